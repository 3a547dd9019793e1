#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "pfrmt/linalg.hpp"

using namespace pfrmt;

namespace {

CMat random_antisymmetric(int dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CMat A = CMat::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      const cplx v(u(rng), u(rng));
      A(i, j) = v;
      A(j, i) = -v;
    }
  return A;
}

CMat random_rect(int rows, int cols, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CMat A(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) A(i, j) = cplx(u(rng), u(rng));
  return A;
}

CMat random_square(int dim, unsigned seed) { return random_rect(dim, dim, seed); }

double rel(cplx got, cplx want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); }

} // namespace

TEST_CASE("determinant: closed forms and LU") {
  CMat one(1, 1);
  one << cplx(3.0, -2.0);
  CHECK(rel(determinant(one), cplx(3.0, -2.0)) < 1e-15);

  CMat two(2, 2);
  two << cplx(1, 0), cplx(2, 0), cplx(3, 0), cplx(4, 0);
  CHECK(rel(determinant(two), cplx(-2.0, 0.0)) < 1e-14);

  // det of a product = product of dets
  const CMat a = random_square(5, 11), b = random_square(5, 12);
  CHECK(rel(determinant(CMat(a * b)), determinant(a) * determinant(b)) < 1e-11);

  // empty matrix: det = 1 by convention
  CHECK(determinant(CMat(0, 0)) == cplx(1.0, 0.0));

  CHECK_THROWS_AS(determinant(CMat(2, 3)), validation_error);
}

TEST_CASE("pfaffian: canonical blocks") {
  // Pf [[0, a], [-a, 0]] = a
  CMat A = CMat::Zero(2, 2);
  A(0, 1) = cplx(2.5, -1.0);
  A(1, 0) = -A(0, 1);
  CHECK(rel(pfaffian(A), cplx(2.5, -1.0)) < 1e-15);

  // Pf of the direct sum of blocks a, b is a*b
  CMat B = CMat::Zero(4, 4);
  B(0, 1) = cplx(2.0, 0.0);
  B(1, 0) = -B(0, 1);
  B(2, 3) = cplx(0.0, 3.0);
  B(3, 2) = -B(2, 3);
  CHECK(rel(pfaffian(B), cplx(0.0, 6.0)) < 1e-14);

  // empty: Pf = 1
  CHECK(pfaffian(CMat(0, 0)) == cplx(1.0, 0.0));

  // odd dimension: value 0, flagged
  const PfaffianResult odd = pfaffian_checked(CMat::Zero(3, 3));
  CHECK(odd.odd_dimension);
  CHECK(odd.value == cplx(0.0, 0.0));
}

TEST_CASE("pfaffian: Pf(A)^2 = det(A) across seeded matrices") {
  for (int dim = 2; dim <= 12; dim += 2)
    for (unsigned seed = 0; seed < 8; ++seed) {
      const CMat A = random_antisymmetric(dim, 1000 + dim * 31 + seed);
      const cplx pf = pfaffian(A);
      CHECK(rel(pf * pf, determinant(A)) < 1e-10);
    }
}

TEST_CASE("pfaffian: block embedding sign Pf[[0,X],[-X^T,0]] = (-1)^(p(p-1)/2) det X") {
  for (int p = 1; p <= 5; ++p)
    for (unsigned seed = 0; seed < 4; ++seed) {
      const CMat X = random_square(p, 500 + 10 * p + seed);
      CMat A = CMat::Zero(2 * p, 2 * p);
      A.block(0, p, p, p) = X;
      A.block(p, 0, p, p) = -X.transpose();
      const cplx want = parity_sign(choose2(p)) * determinant(X);
      CHECK(rel(pfaffian(A), want) < 1e-11);
    }
}

TEST_CASE("pfaffian: recursive and LTL algorithms agree") {
  for (int dim = 2; dim <= 8; dim += 2)
    for (unsigned seed = 0; seed < 4; ++seed) {
      const CMat A = random_antisymmetric(dim, 77 + dim + seed);
      CHECK(rel(pfaffian_recursive(A), pfaffian_ltl(A)) < 1e-12);
      CHECK(rel(pfaffian_checked(A).value, pfaffian_ltl(A)) < 1e-12);
    }
}

TEST_CASE("pfaffian: antisymmetry validation") {
  CMat A = random_antisymmetric(4, 5);
  A(1, 2) += cplx(1e-3, 0.0); // far beyond tol_rel * scale
  CHECK_THROWS_AS(pfaffian_checked(A), validation_error);
  // within tolerance: symmetrized silently
  CMat B = random_antisymmetric(4, 6);
  B(1, 2) += cplx(1e-14, 0.0);
  CHECK_NOTHROW(pfaffian_checked(B));
}

TEST_CASE("vandermonde: product forms and parity") {
  const std::vector<cplx> z = {{1.0, 0.0}, {2.0, 1.0}, {-0.5, 0.3}};
  cplx want(1.0, 0.0);
  for (size_t a = 0; a < z.size(); ++a)
    for (size_t b = a + 1; b < z.size(); ++b) want *= z[a] - z[b];
  CHECK(rel(vandermonde(z), want) < 1e-14);
  CHECK(rel(detail::vandermonde_rev(z), parity_sign(choose2((long)z.size())) * want) < 1e-14);
  CHECK(vandermonde({}) == cplx(1.0, 0.0));
  CHECK(vandermonde({{4.0, 2.0}}) == cplx(1.0, 0.0));
}

TEST_CASE("berezinian: product vs dual determinant form, 50 seeded instances") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int inst = 0; inst < 50; ++inst) {
    const int q = 1 + inst % 4;
    const int p = inst % (q + 1); // p <= q
    std::vector<cplx> x1, x2;
    for (int i = 0; i < p; ++i) x1.push_back({u(rng), u(rng) + 3.0}); // separated
    for (int i = 0; i < q; ++i) x2.push_back({u(rng), u(rng) - 3.0});
    const cplx prod = berezinian_sqrt(x1, x2);
    const cplx det = berezinian_sqrt_det(x1, x2);
    CHECK(rel(prod, det) < 1e-10);
  }
}

TEST_CASE("berezinian: separation guard and p <= q precondition") {
  CHECK_THROWS_AS(berezinian_sqrt({{1.0, 0.0}}, {{1.0, 1e-12}}), validation_error);
  CHECK_THROWS_AS(berezinian_sqrt({{1.0, 0.0}, {2.0, 0.0}}, {{5.0, 1.0}}), validation_error);
}

TEST_CASE("berezinian_rev: matches explicit product") {
  const std::vector<cplx> B = {{0.5, 0.8}, {0.0, 1.3}};
  const std::vector<cplx> F = {{0.9, 0.0}, {0.35, 0.45}};
  cplx want = detail::vandermonde_rev(B) * detail::vandermonde_rev(F);
  for (const cplx& b : B)
    for (const cplx& f : F) want /= b - f;
  CHECK(rel(detail::berezinian_rev(B, F), want) < 1e-14);
}

TEST_CASE("schur_det_reduce: equals direct determinant") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const int p = 2 + seed % 3, q = 3;
    const CMat A = random_square(p, 900 + seed), B = random_rect(p, q, 910 + seed),
               C = random_rect(q, p, 920 + seed), D = random_square(q, 930 + seed);
    CMat M(p + q, p + q);
    M << A, B, C, D;
    CHECK(rel(schur_det_reduce(A, B, C, D), determinant(M)) < 1e-10);
  }
  // singular D
  CHECK_THROWS_AS(
      schur_det_reduce(random_square(2, 1), random_square(2, 2), random_square(2, 3), CMat::Zero(2, 2)),
      numerical_error);
}

TEST_CASE("schur_pf_reduce: equals direct pfaffian") {
  for (unsigned seed = 0; seed < 5; ++seed) {
    const int p = 2, q = 4;
    const CMat A = random_antisymmetric(p, 40 + seed);
    const CMat C = random_antisymmetric(q, 50 + seed);
    const CMat B = random_square(q, 60 + seed).topRows(p);
    CMat M = CMat::Zero(p + q, p + q);
    M.topLeftCorner(p, p) = A;
    M.topRightCorner(p, q) = B;
    M.bottomLeftCorner(q, p) = -B.transpose();
    M.bottomRightCorner(q, q) = C;
    CHECK(rel(schur_pf_reduce(A, B, C), pfaffian(M)) < 1e-10);
  }
}

TEST_CASE("eps_sep_scale: scales with max magnitude") {
  CHECK(eps_sep_scale({{1.0, 0.0}}) == doctest::Approx(1e-9));
  CHECK(eps_sep_scale({{100.0, 0.0}, {1.0, 0.0}}) == doctest::Approx(1e-7));
  CHECK(eps_sep_scale({}) == doctest::Approx(1e-9));
}

#include "pfrmt/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace pfrmt {

cplx determinant(const CMat& A) {
  if (A.rows() != A.cols()) throw validation_error("determinant: matrix must be square");
  if (A.rows() == 0) return {1.0, 0.0};
  return Eigen::PartialPivLU<CMat>(A).determinant();
}

static double max_abs(const CMat& A) {
  if (A.size() == 0) return 0.0;
  return A.cwiseAbs().maxCoeff();
}

cplx pfaffian_recursive(const CMat& A) {
  const long n = A.rows();
  if (n % 2 == 1) return {0.0, 0.0};
  if (n == 0) return {1.0, 0.0};
  if (n == 2) return A(0, 1);
  std::vector<long> keep(n - 2);
  cplx total{0.0, 0.0};
  double sign = 1.0;
  for (long j = 1; j < n; ++j, sign = -sign) {
    if (A(0, j) != cplx(0.0, 0.0)) {
      long m = 0;
      for (long i = 1; i < n; ++i)
        if (i != j) keep[m++] = i;
      CMat minor(n - 2, n - 2);
      for (long r = 0; r < n - 2; ++r)
        for (long c = 0; c < n - 2; ++c) minor(r, c) = A(keep[r], keep[c]);
      total += sign * A(0, j) * pfaffian_recursive(minor);
    }
  }
  return total;
}

cplx pfaffian_ltl(const CMat& A_in) {
  CMat A = A_in;
  const long n = A.rows();
  if (n % 2 == 1) return {0.0, 0.0};
  if (n == 0) return {1.0, 0.0};
  cplx pf{1.0, 0.0};
  for (long k = 0; k + 1 < n; k += 2) {
    // Pivot: move the largest |A(i, k)|, i > k, into row k+1.
    long kp = k + 1;
    double best = std::abs(A(k + 1, k));
    for (long i = k + 2; i < n; ++i) {
      const double v = std::abs(A(i, k));
      if (v > best) {
        best = v;
        kp = i;
      }
    }
    if (kp != k + 1) {
      A.row(k + 1).swap(A.row(kp));
      A.col(k + 1).swap(A.col(kp));
      pf = -pf;
    }
    const cplx piv = A(k, k + 1);
    if (piv == cplx(0.0, 0.0)) return {0.0, 0.0};
    pf *= piv;
    if (k + 2 < n) {
      const long m = n - (k + 2);
      CVec tau = A.block(k, k + 2, 1, m).transpose() / piv;
      CVec col = A.block(k + 2, k + 1, m, 1);
      A.block(k + 2, k + 2, m, m) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

PfaffianResult pfaffian_checked(const CMat& A, double tol_rel) {
  if (A.rows() != A.cols()) throw validation_error("pfaffian: matrix must be square");
  const long n = A.rows();
  PfaffianResult res;
  if (n % 2 == 1) {
    res.odd_dimension = true;
    return res;
  }
  const double scale = std::max(1.0, max_abs(A));
  const double dev = max_abs(A + A.transpose());
  if (dev > tol_rel * scale)
    throw validation_error("pfaffian: input is not antisymmetric within tolerance");
  CMat S = 0.5 * (A - A.transpose());
  res.value = (n <= 8) ? pfaffian_recursive(S) : pfaffian_ltl(S);
  return res;
}

cplx pfaffian(const CMat& A, double tol_rel) { return pfaffian_checked(A, tol_rel).value; }

cplx vandermonde(const std::vector<cplx>& z) {
  cplx out{1.0, 0.0};
  for (std::size_t a = 0; a < z.size(); ++a)
    for (std::size_t b = a + 1; b < z.size(); ++b) out *= z[a] - z[b];
  return out;
}

double eps_sep_scale(const std::vector<cplx>& xs) {
  double m = 1.0;
  for (const cplx& x : xs) m = std::max(m, std::abs(x));
  return 1e-9 * m;
}

cplx berezinian_sqrt(const std::vector<cplx>& x1, const std::vector<cplx>& x2) {
  const std::size_t p = x1.size(), q = x2.size();
  if (p > q) throw validation_error("berezinian_sqrt: requires p <= q");
  std::vector<cplx> all(x1);
  all.insert(all.end(), x2.begin(), x2.end());
  const double eps = eps_sep_scale(all);
  cplx den{1.0, 0.0};
  for (const cplx& a : x1)
    for (const cplx& b : x2) {
      if (std::abs(a - b) < eps)
        throw validation_error("berezinian_sqrt: near-coincident arguments across blocks");
      den *= a - b;
    }
  return vandermonde(x1) * vandermonde(x2) / den;
}

cplx berezinian_sqrt_det(const std::vector<cplx>& x1, const std::vector<cplx>& x2) {
  const long p = static_cast<long>(x1.size()), q = static_cast<long>(x2.size());
  if (p > q) throw validation_error("berezinian_sqrt_det: requires p <= q");
  if (q == 0) return {1.0, 0.0};
  CMat M(q, q);
  for (long a = 0; a < p; ++a)
    for (long b = 0; b < q; ++b) M(a, b) = 1.0 / (x1[a] - x2[b]);
  for (long a = p; a < q; ++a)
    for (long b = 0; b < q; ++b) M(a, b) = pow_int(x2[b], a - p);
  const double sign = parity_sign(choose2(q) + (q + 1) * p);
  return sign * determinant(M);
}

cplx schur_det_reduce(const CMat& A, const CMat& B, const CMat& C, const CMat& D) {
  if (D.rows() != D.cols() || A.rows() != A.cols())
    throw validation_error("schur_det_reduce: A and D must be square");
  if (B.rows() != A.rows() || B.cols() != D.cols() || C.rows() != D.rows() ||
      C.cols() != A.cols())
    throw validation_error("schur_det_reduce: block dimensions not conformal");
  Eigen::PartialPivLU<CMat> lu(D);
  const cplx detD = lu.determinant();
  const double scale = std::max(1.0, max_abs(D));
  if (std::abs(detD) < 1e-14 * std::pow(scale, static_cast<double>(D.rows())))
    throw numerical_error("schur_det_reduce: D block is singular to working precision");
  return detD * determinant(A - B * lu.solve(C));
}

cplx schur_pf_reduce(const CMat& A, const CMat& B, const CMat& C) {
  if (A.rows() != A.cols() || C.rows() != C.cols())
    throw validation_error("schur_pf_reduce: A and C must be square");
  if (A.rows() % 2 != 0 || C.rows() % 2 != 0)
    throw validation_error("schur_pf_reduce: blocks must be even-dimensional");
  if (B.rows() != A.rows() || B.cols() != C.cols())
    throw validation_error("schur_pf_reduce: B block not conformal");
  Eigen::PartialPivLU<CMat> lu(C);
  const double scale = std::max(1.0, max_abs(C));
  if (std::abs(lu.determinant()) < 1e-14 * std::pow(scale, static_cast<double>(C.rows())))
    throw numerical_error("schur_pf_reduce: C block is singular to working precision");
  const cplx pfC = pfaffian(C);
  return pfC * pfaffian(A + B * lu.solve(B.transpose()), 1e-10);
}

namespace detail {

cplx vandermonde_rev(const std::vector<cplx>& z) {
  cplx out{1.0, 0.0};
  for (std::size_t a = 0; a < z.size(); ++a)
    for (std::size_t b = a + 1; b < z.size(); ++b) out *= z[b] - z[a];
  return out;
}

cplx berezinian_rev(const std::vector<cplx>& B, const std::vector<cplx>& F) {
  cplx den{1.0, 0.0};
  for (const cplx& b : B)
    for (const cplx& f : F) den *= b - f;
  return vandermonde_rev(B) * vandermonde_rev(F) / den;
}

}  // namespace detail

}  // namespace pfrmt

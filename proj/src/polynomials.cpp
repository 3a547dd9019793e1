#include "pfrmt/polynomials.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pfrmt/quadrature.hpp"

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include "json.hpp"
#endif

namespace pfrmt {

namespace {

constexpr int kMaxDegree = 20;

// Recurrence evaluation against explicit coefficient arrays (used during
// construction, before the OrthogonalSystem object exists).
double eval_rec(const std::vector<double>& a, const std::vector<double>& b, int j,
                double y) {
  if (j < 0) return 0.0;
  double pm1 = 0.0, pj = 1.0;
  for (int i = 0; i < j; ++i) {
    const double pn = (y - a[i]) * pj - b[i] * pm1;
    pm1 = pj;
    pj = pn;
  }
  return pj;
}

std::vector<double> next_monic(const std::vector<double>& cj,
                               const std::vector<double>& cm1, double aj, double bj) {
  // p_{j+1} = y*p_j - a_j*p_j - b_j*p_{j-1}, ascending coefficients.
  std::vector<double> out(cj.size() + 1, 0.0);
  for (size_t i = 0; i < cj.size(); ++i) {
    out[i + 1] += cj[i];
    out[i] -= aj * cj[i];
  }
  for (size_t i = 0; i < cm1.size(); ++i) out[i] -= bj * cm1[i];
  return out;
}

double axis_distance(cplx u) {
  return (u.real() >= 0.0) ? std::abs(u.imag()) : std::abs(u);
}

void check_off_axis(cplx u, double eps_axis, const char* who) {
  const double d = axis_distance(u);
  if (!(d >= eps_axis * std::max(1.0, std::abs(u)))) {
    throw validation_error(std::string(who) +
                           ": squared argument lies on or too close to the positive "
                           "real axis; no principal-value path is provided");
  }
}

}  // namespace

OrthogonalSystem build_orthogonal_system(const EnsembleParams& p, int J) {
  p.validate();
  if (J < 0 || J > kMaxDegree)
    throw validation_error("build_orthogonal_system: degree must be in [0, 20]");

  OrthogonalSystem sys;
  sys.params = p;
  sys.degree = J;
  sys.coeffs.push_back({1.0});

  for (int j = 0; j <= J; ++j) {
    auto pj = [&](double y) { return eval_rec(sys.rec_a, sys.rec_b, j, y); };
    const double hj =
        require_converged(integrate_semiinf([&](double y) -> cplx {
                            const double v = pj(y);
                            return cplx(v * v * weight_y(p, y), 0.0);
                          }),
                          "orthogonal-system norm integral")
            .real();
    if (!(hj > 0.0) || !std::isfinite(hj))
      throw numerical_error(
          "build_orthogonal_system: norm positivity lost at degree " +
          std::to_string(j));
    const double yj =
        require_converged(integrate_semiinf([&](double y) -> cplx {
                            const double v = pj(y);
                            return cplx(y * v * v * weight_y(p, y), 0.0);
                          }),
                          "orthogonal-system first-moment integral")
            .real();
    sys.norms.push_back(hj);
    sys.rec_a.push_back(yj / hj);
    sys.rec_b.push_back(j == 0 ? 0.0 : hj / sys.norms[j - 1]);
    if (j < J) {
      const auto& cm1 = (j == 0) ? std::vector<double>{} : sys.coeffs[j - 1];
      sys.coeffs.push_back(next_monic(sys.coeffs[j], cm1, sys.rec_a[j], sys.rec_b[j]));
    }
  }
  return sys;
}

OrthogonalSystem laguerre_closed_form(const EnsembleParams& p, int J) {
  p.validate();
  if (p.potential.size() != 1 || p.potential[0] != 1.0)
    throw validation_error(
        "laguerre_closed_form: closed form exists only for the Gaussian potential "
        "V(y) = y");
  if (J < 0 || J > kMaxDegree)
    throw validation_error("laguerre_closed_form: degree must be in [0, 20]");

  const double nu = p.nu, al = p.alpha;
  OrthogonalSystem sys;
  sys.params = p;
  sys.degree = J;
  for (int j = 0; j <= J; ++j) {
    sys.rec_a.push_back((2.0 * j + nu + 1.0) / al);
    sys.rec_b.push_back(j * (j + nu) / (al * al));
    sys.norms.push_back(0.5 * std::exp(std::lgamma(j + 1.0) + std::lgamma(j + nu + 1.0) -
                                       (2.0 * j + nu + 1.0) * std::log(al)));
    std::vector<double> c(j + 1, 0.0);
    for (int i = 0; i <= j; ++i) {
      const double mag =
          std::exp(std::lgamma(j + 1.0) - std::lgamma(i + 1.0) + std::lgamma(j + nu + 1.0) -
                   std::lgamma(i + nu + 1.0) - std::lgamma(j - i + 1.0) +
                   (i - j) * std::log(al));
      c[i] = parity_sign(j + i) * mag;
    }
    sys.coeffs.push_back(std::move(c));
  }
  return sys;
}

namespace {
template <class T>
T eval_p_impl(const OrthogonalSystem& sys, int j, T y) {
  if (j < -1 || j > sys.degree)
    throw validation_error("eval_p: degree out of range for this system");
  if (j == -1) return T(0.0);
  T pm1(0.0), pj(1.0);
  for (int i = 0; i < j; ++i) {
    const T pn = (y - sys.rec_a[i]) * pj - sys.rec_b[i] * pm1;
    pm1 = pj;
    pj = pn;
  }
  return pj;
}
}  // namespace

double eval_p(const OrthogonalSystem& sys, int j, double y) {
  return eval_p_impl(sys, j, y);
}

cplx eval_p(const OrthogonalSystem& sys, int j, cplx y) { return eval_p_impl(sys, j, y); }

cplx eval_p_horner(const OrthogonalSystem& sys, int j, cplx y) {
  if (j < 0 || j > sys.degree)
    throw validation_error("eval_p_horner: degree out of range for this system");
  const auto& c = sys.coeffs[j];
  cplx acc(0.0);
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * y + *it;
  return acc;
}

cplx cauchy_transform(const OrthogonalSystem& sys, int j, cplx x, double eps_axis) {
  if (j < 0 || j > std::min(sys.degree, 10))
    throw validation_error(
        "cauchy_transform: degree out of range (direct quadrature path is capped at "
        "10)");
  const cplx u = x * x;
  check_off_axis(u, eps_axis, "cauchy_transform");
  const auto& p = sys.params;
  auto r = integrate_semiinf(
      [&](double y) -> cplx { return eval_p(sys, j, y) * weight_y(p, y) / (y - u); },
      1e-12, 1e-15, 8000);
  return require_converged(r, "cauchy_transform quadrature");
}

std::vector<cplx> cauchy_transform_table(const OrthogonalSystem& sys, cplx u, int jmax,
                                         double eps_axis) {
  if (jmax < 0 || jmax > sys.degree)
    throw validation_error("cauchy_transform_table: jmax out of range for this system");
  check_off_axis(u, eps_axis, "cauchy_transform_table");
  const auto& p = sys.params;
  auto r = integrate_semiinf(
      [&](double y) -> cplx { return weight_y(p, y) / (y - u); }, 1e-12, 1e-15, 8000);
  std::vector<cplx> tab(jmax + 1);
  tab[0] = require_converged(r, "cauchy_transform_table base quadrature");
  if (jmax >= 1) tab[1] = (u - sys.rec_a[0]) * tab[0] + sys.norms[0];
  for (int j = 1; j < jmax; ++j)
    tab[j + 1] = (u - sys.rec_a[j]) * tab[j] - sys.rec_b[j] * tab[j - 1];
  return tab;
}

std::vector<double> skew_poly_coeffs(const OrthogonalSystem& sys, int j) {
  if (j < 0 || j > 2 * sys.degree + 1)
    throw validation_error("skew_poly_coeffs: index out of range for this system");
  const int l = j / 2;
  const bool odd = (j % 2) != 0;
  const auto& c = sys.coeffs[l];
  std::vector<double> out(2 * l + 1 + (odd ? 1 : 0), 0.0);
  for (int i = 0; i <= l; ++i) out[2 * i + (odd ? 1 : 0)] = c[i];
  return out;
}

std::vector<std::vector<double>> skew_polynomials(const OrthogonalSystem& sys, int J) {
  if (J < 0 || J > sys.degree)
    throw validation_error("skew_polynomials: J out of range for this system");
  std::vector<std::vector<double>> out;
  out.reserve(2 * J + 2);
  for (int j = 0; j <= 2 * J + 1; ++j) out.push_back(skew_poly_coeffs(sys, j));
  return out;
}

double skew_product(const EnsembleParams& p, const std::vector<double>& f,
                    const std::vector<double>& g) {
  p.validate();
  if (f.empty() || g.empty())
    throw validation_error("skew_product: empty coefficient array");
  auto horner = [](const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  };
  auto r = integrate_semiinf(
      [&](double x) -> cplx {
        const double arg = p.alpha * potential_eval(p, x * x);
        if (arg > 745.0) return cplx(0.0);
        const double w = pow_int(x, 2L * p.nu) * std::exp(-arg);
        const double v =
            0.5 * (horner(f, x) * horner(g, -x) - horner(g, x) * horner(f, -x));
        return cplx(v * w, 0.0);
      },
      1e-12, 1e-15, 8000);
  return require_converged(r, "skew_product quadrature").real();
}

double nu_recursion_check(const OrthogonalSystem& sys_nu,
                          const OrthogonalSystem& sys_nup1, int j,
                          const std::vector<double>& y_grid) {
  const auto& a = sys_nu.params;
  const auto& b = sys_nup1.params;
  if (b.nu != a.nu + 1 || b.alpha != a.alpha || b.potential != a.potential)
    throw validation_error(
        "nu_recursion_check: systems must share alpha and potential and differ by "
        "exactly one unit of nu");
  if (j < 0 || j + 1 > sys_nu.degree || j > sys_nup1.degree)
    throw validation_error("nu_recursion_check: degree out of range");
  if (y_grid.empty()) throw validation_error("nu_recursion_check: empty grid");
  for (double y : y_grid)
    if (!(y > 0.0))
      throw validation_error("nu_recursion_check: grid points must be positive");

  const double pj0 = eval_p(sys_nu, j, 0.0);
  const double pj10 = eval_p(sys_nu, j + 1, 0.0);
  if (std::abs(pj0) < 1e-14 * std::max(1.0, std::abs(pj10)))
    throw numerical_error(
        "nu_recursion_check: relation degenerates (p_j vanishes at the origin)");

  double max_dev = 0.0, max_lhs = 0.0;
  for (double y : y_grid) {
    const double lhs = eval_p(sys_nup1, j, y);
    const double rhs =
        (pj0 * eval_p(sys_nu, j + 1, y) - pj10 * eval_p(sys_nu, j, y)) / (y * pj0);
    max_dev = std::max(max_dev, std::abs(lhs - rhs));
    max_lhs = std::max(max_lhs, std::abs(lhs));
  }
  if (max_lhs == 0.0) throw numerical_error("nu_recursion_check: zero reference");
  return max_dev / max_lhs;
}

std::string orthogonal_system_to_json(const OrthogonalSystem& sys) {
  nlohmann::json j;
  j["nu"] = sys.params.nu;
  j["alpha"] = sys.params.alpha;
  j["potential"] = sys.params.potential;
  j["coeffs"] = sys.coeffs;
  j["norms"] = sys.norms;
  j["rec_a"] = sys.rec_a;
  j["rec_b"] = sys.rec_b;
  return j.dump();
}

}  // namespace pfrmt

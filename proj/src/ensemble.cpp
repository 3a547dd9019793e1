#include "pfrmt/ensemble.hpp"

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include "json.hpp"  // vendored single-header nlohmann/json
#endif

#include <cmath>

#include "pfrmt/quadrature.hpp"

namespace pfrmt {

void EnsembleParams::validate() const {
  if (n < 1) throw validation_error("ensemble: n must be >= 1");
  if (nu < 0 || nu > n) throw validation_error("ensemble: requires 0 <= nu <= n");
  if (!(alpha > 0.0)) throw validation_error("ensemble: alpha must be positive");
  if (potential.empty()) throw validation_error("ensemble: potential must be non-empty");
  if (!(potential.back() > 0.0))
    throw validation_error("ensemble: leading potential coefficient must be positive");
}

double potential_eval(const EnsembleParams& p, double y) {
  // Horner in y with the constant term absent: V(y) = y*(c1 + y*(c2 + ...)).
  double acc = 0.0;
  for (auto it = p.potential.rbegin(); it != p.potential.rend(); ++it) acc = acc * y + *it;
  return acc * y;
}

double weight_eval(const EnsembleParams& p, double lambda) {
  if (lambda < 0.0) throw validation_error("weight_eval: lambda must be >= 0");
  const double ex = p.alpha * potential_eval(p, lambda * lambda);
  if (ex > 745.0) return 0.0;  // underflow guard before the power can overflow
  return std::pow(lambda, 2 * p.nu + 1) * std::exp(-ex);
}

double weight_y(const EnsembleParams& p, double y) {
  if (y < 0.0) return 0.0;
  const double ex = p.alpha * potential_eval(p, y);
  if (ex > 745.0) return 0.0;
  return 0.5 * std::pow(y, p.nu) * std::exp(-ex);
}

CMat moment_matrix(const EnsembleParams& p, int d) {
  p.validate();
  if (d < 1) throw validation_error("moment_matrix: d must be >= 1");
  CMat M(d, d);
  for (int a = 1; a <= d; ++a)
    for (int b = a; b <= d; ++b) {
      const int m = a + b - 2;
      auto integrand = [&](double y) -> cplx {
        const double w = weight_y(p, y);
        if (w == 0.0) return {0.0, 0.0};
        return cplx(std::pow(y, m) * w, 0.0);
      };
      const cplx v =
          require_converged(integrate_semiinf(integrand, 1e-12, 1e-15), "moment_matrix");
      M(a - 1, b - 1) = v;
      M(b - 1, a - 1) = v;
    }
  return M;
}

CMat skew_moment_matrix(const EnsembleParams& p, int d) {
  p.validate();
  if (d < 2 || d % 2 != 0) throw validation_error("skew_moment_matrix: d must be even");
  CMat M = CMat::Zero(d, d);
  for (int a = 1; a <= d; ++a)
    for (int b = a + 1; b <= d; ++b) {
      if ((a + b) % 2 == 0) continue;  // the bracket cancels identically
      auto integrand = [&](double x) -> cplx {
        const double ex = p.alpha * potential_eval(p, x * x);
        if (ex > 745.0) return {0.0, 0.0};
        const double bracket = 0.5 * (std::pow(x, a - 1) * std::pow(-x, b - 1) -
                                      std::pow(x, b - 1) * std::pow(-x, a - 1));
        return cplx(bracket * std::pow(x, 2 * p.nu) * std::exp(-ex), 0.0);
      };
      const cplx v = require_converged(integrate_semiinf(integrand, 1e-12, 1e-15),
                                       "skew_moment_matrix");
      M(a - 1, b - 1) = v;
      M(b - 1, a - 1) = -v;
    }
  return M;
}

double joint_density(const EnsembleParams& p, const std::vector<double>& lambdas) {
  p.validate();
  if (static_cast<int>(lambdas.size()) != p.n)
    throw validation_error("joint_density: expected exactly n eigenvalues");
  double vdm = 1.0;
  for (std::size_t a = 0; a < lambdas.size(); ++a)
    for (std::size_t b = a + 1; b < lambdas.size(); ++b) {
      const double d = lambdas[a] * lambdas[a] - lambdas[b] * lambdas[b];
      vdm *= d * d;
    }
  double w = 1.0;
  for (double l : lambdas) w *= weight_eval(p, l);
  return vdm * w;
}

EnsembleParams ensemble_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw validation_error(std::string("ensemble JSON parse error: ") + e.what());
  }
  EnsembleParams p;
  try {
    p.n = j.at("n").get<int>();
    p.nu = j.at("nu").get<int>();
    p.alpha = j.at("alpha").get<double>();
    if (j.contains("potential")) p.potential = j["potential"].get<std::vector<double>>();
  } catch (const std::exception& e) {
    throw validation_error(std::string("ensemble JSON field error: ") + e.what());
  }
  p.validate();
  return p;
}

std::string ensemble_to_json(const EnsembleParams& p) {
  nlohmann::json j;
  j["n"] = p.n;
  j["nu"] = p.nu;
  j["alpha"] = p.alpha;
  j["potential"] = p.potential;
  return j.dump();
}

}  // namespace pfrmt

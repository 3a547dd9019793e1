#pragma once

#include <functional>
#include <vector>

#include "pfrmt/common.hpp"

namespace pfrmt {

struct QuadRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre rule on [-1, 1], nodes ascending. Computed by the
// Golub-Welsch eigenvalue method and cached per order.
const QuadRule& gauss_legendre(int n);

// Gauss-Hermite rule for integrals of e^{-t^2} f(t) over the real line.
const QuadRule& gauss_hermite(int n);

struct QuadResult {
  cplx value{0.0, 0.0};
  double abs_err = 0.0;
  int panels = 0;
  bool converged = false;
};

// Globally adaptive panel integration of a complex-valued integrand on [a, b]:
// embedded Gauss-Legendre estimates per panel, worst panel bisected first,
// stopping when the accumulated error estimate drops below
// max(abs_floor, rel_tol * |integral|). Panels stop splitting after 20
// bisection levels; if the tolerance is still unmet, converged = false.
QuadResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                              double rel_tol = 1e-12, double abs_floor = 1e-15,
                              int max_panels = 4000);

// Integral over [0, inf) via the map y = t/(1-t).
QuadResult integrate_semiinf(const std::function<cplx(double)>& f, double rel_tol = 1e-12,
                             double abs_floor = 1e-15, int max_panels = 4000);

// Integral over (-inf, inf) via the map z = t/(1-t^2).
QuadResult integrate_real_line(const std::function<cplx(double)>& f, double rel_tol = 1e-12,
                               double abs_floor = 1e-15, int max_panels = 4000);

// Throws numerical_error if r did not converge; returns r.value otherwise.
cplx require_converged(const QuadResult& r, const char* what);

}  // namespace pfrmt

#pragma once

#include <string>
#include <vector>

#include "pfrmt/common.hpp"
#include "pfrmt/ensemble.hpp"

namespace pfrmt {

// Monic polynomials p_0..p_J orthogonal under dsigma(y) = (1/2) y^nu e^{-alpha V(y)} dy
// on [0, inf), together with their squared norms h_j and the three-term recurrence
// p_{j+1}(y) = (y - a_j) p_j(y) - b_j p_{j-1}(y). Immutable after construction.
struct OrthogonalSystem {
  EnsembleParams params;                    // nu / alpha / potential are the relevant fields
  int degree = 0;                           // highest built degree J
  std::vector<std::vector<double>> coeffs;  // ascending monic coefficients, j = 0..J
  std::vector<double> norms;                // h_j, j = 0..J
  std::vector<double> rec_a;                // a_j, j = 0..J
  std::vector<double> rec_b;                // b_j (b_0 = 0), j = 0..J
};

// Builds the system by the Stieltjes procedure (recurrence coefficients from
// quadrature moments of the current polynomial, never Gram-Schmidt on raw
// moments). J is capped at 20; loss of norm positivity throws numerical_error.
OrthogonalSystem build_orthogonal_system(const EnsembleParams& p, int J);

// Closed-form coefficients for the Gaussian potential V(y) = y (associated
// Laguerre family). Throws validation_error for any other potential.
OrthogonalSystem laguerre_closed_form(const EnsembleParams& p, int J);

// Recurrence evaluation of p_j (stable); j = -1 returns 0 by convention.
double eval_p(const OrthogonalSystem& sys, int j, double y);
cplx eval_p(const OrthogonalSystem& sys, int j, cplx y);

// Horner evaluation from the stored coefficient array (conditioning cross-check).
cplx eval_p_horner(const OrthogonalSystem& sys, int j, cplx y);

// Cauchy transform evaluated at the squared flavor variable:
//   cauchy_transform(sys, j, x) = int_0^inf p_j(l^2) / (l^2 - x^2) l^{2 nu + 1}
//                                 e^{-alpha V(l^2)} dl
// by direct adaptive complex quadrature. Requires x^2 to lie off the positive
// real axis by at least eps_axis * max(1, |x|^2); near-axis input throws
// validation_error. j is capped at 10 by the same design decision that keeps
// this op quadrature-based.
cplx cauchy_transform(const OrthogonalSystem& sys, int j, cplx x,
                      double eps_axis = 1e-8);

// Internal table used by the factorization formulas: phat_0(u) by direct
// quadrature, then the upward recurrence
//   phat_1 = (u - a_0) phat_0 + h_0,  phat_{j+1} = (u - a_j) phat_j - b_j phat_{j-1},
// for j = 0..jmax. Cross-validated against cauchy_transform in the tests.
std::vector<cplx> cauchy_transform_table(const OrthogonalSystem& sys, cplx u, int jmax,
                                         double eps_axis = 1e-8);

// Skew-orthogonal polynomials with the free additive constant pinned to zero:
// q_{2l}(x) = p_l(x^2), q_{2l+1}(x) = x p_l(x^2). Ascending coefficients in x.
std::vector<double> skew_poly_coeffs(const OrthogonalSystem& sys, int j);

// The full family q_0..q_{2J+1}; q_j has degree j and parity (-1)^j.
std::vector<std::vector<double>> skew_polynomials(const OrthogonalSystem& sys, int J);

// Antisymmetric two-point pairing reduced to one dimension:
//   <f, g> = (1/2) int_0^inf [f(x) g(-x) - g(x) f(-x)] x^{2 nu} e^{-alpha V(x^2)} dx.
// f, g given by ascending coefficient arrays in x.
double skew_product(const EnsembleParams& p, const std::vector<double>& f,
                    const std::vector<double>& g);

// Sup-norm relative residual of the rank-one index shift linking the nu and
// nu+1 families:
//   p_j^{(nu+1)}(y) = [p_j(0) p_{j+1}(y) - p_{j+1}(0) p_j(y)] / (y p_j(0)),
// maximized over y_grid. Throws numerical_error when the relation degenerates
// (p_j^{(nu)}(0) ~ 0).
double nu_recursion_check(const OrthogonalSystem& sys_nu,
                          const OrthogonalSystem& sys_nup1, int j,
                          const std::vector<double>& y_grid);

// {"nu":..., "alpha":..., "potential":[...], "coeffs":[[...]], "norms":[...]}
std::string orthogonal_system_to_json(const OrthogonalSystem& sys);

}  // namespace pfrmt

#pragma once

#include <string>
#include <vector>

#include "pfrmt/common.hpp"
#include "pfrmt/linalg.hpp"

namespace pfrmt {

// Parameters of the chiral unitary ensemble: block size n, rectangularity nu
// (number of generic zero modes), scale alpha, and the confining potential
// V(y) = sum_m potential[m-1] * y^m with positive leading coefficient.
struct EnsembleParams {
  int n = 1;
  int nu = 0;
  double alpha = 1.0;
  std::vector<double> potential{1.0};

  void validate() const;
};

// V(y) for real or complex y.
double potential_eval(const EnsembleParams& p, double y);

// Radial eigenvalue weight w(lambda) = lambda^{2 nu + 1} exp(-alpha V(lambda^2))
// on [0, inf).
double weight_eval(const EnsembleParams& p, double lambda);

// Weight of the squared-variable measure dsigma(y) = (1/2) y^nu exp(-alpha V(y)) dy
// on [0, inf), the measure the orthogonal-polynomial layer works in.
double weight_y(const EnsembleParams& p, double y);

// d x d Hankel moment matrix M_ab = int lambda^{2(a+b-2)} w(lambda) dlambda
// (1-indexed a, b), symmetric positive definite.
CMat moment_matrix(const EnsembleParams& p, int d);

// d x d antisymmetric pair-moment matrix (d even):
// Mt_ab = (1/2) int [x^{a-1}(-x)^{b-1} - x^{b-1}(-x)^{a-1}] x^{2 nu} e^{-alpha V(x^2)} dx.
// Entries with a+b even vanish identically.
CMat skew_moment_matrix(const EnsembleParams& p, int d);

// Unnormalized joint eigenvalue density Delta_n^2(lambda^2) prod_a w(lambda_a).
double joint_density(const EnsembleParams& p, const std::vector<double>& lambdas);

// JSON round-trip: {"n":..., "nu":..., "alpha":..., "potential":[...]}.
EnsembleParams ensemble_from_json(const std::string& text);
std::string ensemble_to_json(const EnsembleParams& p);

}  // namespace pfrmt

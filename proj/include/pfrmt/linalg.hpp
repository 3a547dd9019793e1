#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pfrmt/common.hpp"

namespace pfrmt {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// ---- determinants -----------------------------------------------------------

// det(A) by partial-pivot LU. Throws validation_error on non-square input.
cplx determinant(const CMat& A);

// ---- Pfaffians --------------------------------------------------------------

struct PfaffianResult {
  cplx value{0.0, 0.0};
  bool odd_dimension = false;  // odd-dimensional input: value 0 by convention
};

// Pf(A) of an antisymmetric matrix. Input is validated against
// max|A + A^T| <= tol_rel * max(1, max|A|) and symmetrized to (A - A^T)/2
// before factorization; beyond-tolerance input throws validation_error.
// Odd dimension returns {0, odd_dimension=true}.
PfaffianResult pfaffian_checked(const CMat& A, double tol_rel = 1e-12);

// Convenience wrapper returning only the value.
cplx pfaffian(const CMat& A, double tol_rel = 1e-12);

// The two internal algorithms, exposed as mutual oracles for testing.
// Both assume an exactly antisymmetric even-dimensional input.
cplx pfaffian_recursive(const CMat& A);  // cofactor-style expansion, O(n!)
cplx pfaffian_ltl(const CMat& A);        // partial-pivot skew elimination, O(n^3)

// ---- Vandermonde and Berezinian ---------------------------------------------

// Delta_N(z) = prod_{a<b} (z_a - z_b).
cplx vandermonde(const std::vector<cplx>& z);

// B_{p/q}(x1; x2) = Delta_p(x1) Delta_q(x2) / prod_{a,b}(x1_a - x2_b),
// product form. Requires p <= q and pairwise separation
// |x1_a - x2_b| > eps_sep (= 1e-9 * max input magnitude); violations throw.
cplx berezinian_sqrt(const std::vector<cplx>& x1, const std::vector<cplx>& x2);

// Same value through the dual determinant form: a q x q matrix whose first p
// rows are Cauchy factors 1/(x1_a - x2_b) and remaining q-p rows are ascending
// monomials x2_b^a, with sign (-1)^{q(q-1)/2 + (q+1)p}. Cross-check path.
cplx berezinian_sqrt_det(const std::vector<cplx>& x1, const std::vector<cplx>& x2);

// ---- block reductions --------------------------------------------------------

// det [[A, B], [C, D]] = det(D) * det(A - B D^{-1} C). Throws numerical_error
// if D is singular to working precision.
cplx schur_det_reduce(const CMat& A, const CMat& B, const CMat& C, const CMat& D);

// Pf [[A, B], [-B^T, C]] = Pf(C) * Pf(A + B C^{-1} B^T) for antisymmetric A, C.
cplx schur_pf_reduce(const CMat& A, const CMat& B, const CMat& C);

// Separation scale used for near-coincidence guards.
double eps_sep_scale(const std::vector<cplx>& xs);

namespace detail {
// prod_{a<b} (z_b - z_a): the ordering used internally by the partition-kernel
// formulas (differs from the public vandermonde() by (-1)^{N(N-1)/2}).
cplx vandermonde_rev(const std::vector<cplx>& z);
// Delta^rev(B) Delta^rev(F) / prod_{b,f} (B_b - F_f): internal normalization of
// the factorization formulas (pinned in this convention).
cplx berezinian_rev(const std::vector<cplx>& B, const std::vector<cplx>& F);
}  // namespace detail

}  // namespace pfrmt

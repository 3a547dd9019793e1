#pragma once
// Microscopic (hard-edge) limit of the chiral partition functions.
//
// In the scaling limit n -> inf with x = 2 kappa sqrt(alpha N_eff) held
// fixed (N_eff = n + (nu+1)/2), the orthogonal polynomials become Bessel
// J_nu and their Cauchy transforms become modified Bessel K_nu.  The limit
// partition functions are assembled from three two-point kernels:
//
//   I1(nu; a, b) = [a J_{nu-1}(a) J_nu(b) - b J_nu(a) J_{nu-1}(b)] / (a^2 - b^2)
//   I2(nu; a, b) = [a K_{nu-1}(a) J_nu(b) + b K_nu(a) J_{nu-1}(b)] ... see kernel_I
//   I3(nu; a, b) = [a K_{nu-1}(a) K_nu(b) - b K_nu(a) K_{nu-1}(b)] / (a^2 - b^2)
//
// (a carries the K's in I2; I1/I3 have removable diagonals, listed below.)
//
// micro_partition_det and micro_partition_pf are the determinant and
// Pfaffian forms of the limit of Z_{k1/k2}; with the normalization pinned
// here they agree identically (the overall flavor-count-dependent constant
// (-1)^{k2(k2-1)/2} is folded into micro_partition_pf so both routes return
// the same number).  Arguments are the *unsquared* microscopic variables;
// complex values are supported (J entire in the series window, K validated
// to its principal domain).
//
// All values are normalized so that the empty flavor set gives 1; only
// ratios of these limits are physical.

#include <vector>

#include "pfrmt/common.hpp"
#include "pfrmt/partition.hpp" // FlavorSet, DetSplit

namespace pfrmt {

// Two-point microscopic kernels, which in {1,2,3}.
//   which=1: both arguments fermionic-type (J/J); diagonal a == b uses
//            [J_{nu+1}(a) J_{nu-1}(a) - J_nu(a)^2] / 2.
//   which=2: a bosonic-type (K), b fermionic-type (J):
//            [a K_{nu-1}(a) J_nu(b) - b K_nu(a) J_{nu-1}(b)] / (a^2 - b^2);
//            no diagonal branch (throws when a^2 ~ b^2).
//   which=3: both bosonic-type (K/K); diagonal a == b uses
//            [K_{nu+1}(a) K_{nu-1}(a) - K_nu(a)^2] / 2.
// The diagonal branch is taken on exact equality a == b only; 0 < |a - b|
// below the separation scale throws validation_error so the caller chooses
// the branch explicitly.
cplx kernel_I(int which, long nu, cplx a, cplx b);

// Determinant form of the microscopic limit of Z_{k1/k2} (ratio
// normalization).  flavors holds the unsquared microscopic arguments
// (bosonic -> K entries, fermionic -> J entries); squares must be pairwise
// distinct within and across groups.  split plays the same role as in
// partition_det: bosonic flavors B.first(l11) and fermionic F.first(l21) go
// to the "conjugate" group; requires k2 - k1 + 2*l11 - 2*l21 >= 0.
cplx micro_partition_det(long nu, const FlavorSet& flavors, const DetSplit& split = {});

// Pfaffian form of the same limit; even k1+k2 uses the plain skew kernel
// matrix, odd k1+k2 adds a J_nu/K_nu border row.  Normalization is pinned
// so the result equals micro_partition_det.  Antisymmetry of the assembled
// matrix is verified (numerical_error on failure).
cplx micro_partition_pf(long nu, const FlavorSet& flavors);

// --- finite-n convergence studies --------------------------------------

// One row of the polynomial/Cauchy-transform convergence table.
struct ConvergenceRow {
  long n = 0;
  double dev_p = 0.0;    // max_x | c_n P_n(x^2/(4 alpha N_eff)) / (J_nu(x)/x^nu) - 1 |
  double dev_phat = 0.0; // max_x | C Phat_n(-x^2/(4 alpha N_eff)) / (x^nu K_nu(x)) - 1 |
};

// One (n, x) entry of the per-point convergence table.
struct ConvergencePoint {
  long n = 0;
  double x = 0.0;
  double dev_p = 0.0;
  double dev_phat = 0.0;
};

// Per-point relative deviation of the scaled Laguerre-family orthonormal
// polynomials P_n (at argument x^2/(4 alpha N_eff)) from J_nu(x)/x^nu, and of
// the scaled Cauchy transforms from x^nu K_nu(x): one entry per (n, x) pair,
// n-major in input order.  The polynomial scaling constant is the analytic
// closed form in (alpha, n, nu); the transform scaling is pinned at the
// reference point x = 1.
std::vector<ConvergencePoint> convergence_table(long nu, double alpha,
                                                const std::vector<double>& x_grid,
                                                const std::vector<long>& n_list);

// Max-over-x_grid reduction of convergence_table, one row per n.  Deviations
// must decrease with n (checked by callers).
std::vector<ConvergenceRow> convergence_study(long nu, double alpha,
                                              const std::vector<double>& x_grid,
                                              const std::vector<long>& n_list);

// Scaled finite-n two-fermion block Z_{0/2}(x1, x2) evaluated through the
// orthonormal recurrence (no degree cap, stable to n >= 200), up to an
// n-dependent constant that cancels in ratios.  Used to check finite-n ->
// microscopic convergence of micro_partition_det's (0,2) value via
//   [Zf(n, x, x') / Zf(n, r, r')]  ->  [M(x, x') / M(r, r')].
double z02_scaled_finite_n(long nu, double alpha, long n, double x1, double x2);

} // namespace pfrmt

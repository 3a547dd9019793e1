#pragma once

#include <string>
#include <vector>

#include "pfrmt/common.hpp"
#include "pfrmt/ensemble.hpp"
#include "pfrmt/polynomials.hpp"

namespace pfrmt {

// Spectral arguments of the characteristic-polynomial ratio: k1 "bosonic"
// flavors in denominators, k2 "fermionic" flavors in numerators.
struct FlavorSet {
  std::vector<cplx> bosonic;    // kappa_{j1}
  std::vector<cplx> fermionic;  // kappa_{j2}
};

// Chiral-route validation: squared arguments pairwise distinct (within and
// across blocks) beyond eps_sep, and every bosonic kappa^2 off [0, inf)
// (equivalently Im kappa != 0), so the Cauchy transforms converge.
void validate_flavors_chiral(const FlavorSet& f);

// Generic-route validation: arguments themselves pairwise distinct; bosonic
// kappa off the real axis; every kappa off the negative real axis so the
// principal square root is single-valued.
void validate_flavors_generic(const FlavorSet& f);

// Assignment of flavors to the two groups of the determinant factorization:
// the first l11 bosonic and first l21 fermionic flavors form group 1, the rest
// group 2. Derived sizes d1 = n + l21 - l11, d2 = n + l22 - l12 must be >= 0.
struct DetSplit {
  int l11 = 0;
  int l21 = 0;
};

struct PartitionResult {
  cplx value{0.0, 0.0};
  std::string method;                         // det | pfaffian | generic_pfaffian | mc | quad
  std::string normalization = "ratio-to-Z00";  // all routes report Z_{k1/k2}/Z_{0/0}
  double stderr_est = -1.0;                   // jackknife stderr; < 0 when not stochastic
  bool warning = false;                       // Monte Carlo: stderr exceeds |mean|
};

// One- and two-flavor partition-function ratios at matrix size m, the entries
// every factorization is assembled from. Slot conventions: `a` is the argument
// used where a bosonic flavor is expected (z10; first slot of z20 and z11),
// `b` where a fermionic one is (z01; second slot of z11); z02 reads both slots
// as fermionic, z20 reads both as bosonic. Blocks whose bosonic-slot arguments
// fail the off-support test (kappa^2 too close to [0, inf)) are returned as
// NaN rather than aborting the rest. Requires 1 <= m <= sys.degree - 1 and
// |a^2 - b^2| > eps_sep.
struct ZBlocks {
  cplx z01, z10, z02, z20, z11;
};
ZBlocks z_building_blocks(const OrthogonalSystem& sys, int m, cplx a, cplx b);

// Z_{k1/k2}/Z_{0/0} as a single determinant of size l22+l11 built from the
// one- and two-flavor blocks, with Berezinian prefactors of the two groups.
// Value is independent of the split. Requires sys.degree >= max(d1, d2, n).
PartitionResult partition_det(const OrthogonalSystem& sys, const EnsembleParams& params,
                              const FlavorSet& flavors, const DetSplit& split);

// Z_{k1/k2}/Z_{0/0} as a single Pfaffian of dimension k1+k2 (+1 bordering
// row/column when k1+k2 is odd), kernel entries built from Christoffel-Darboux
// sums truncated at T = n + floor((k2-k1)/2). Asserts antisymmetry of the
// assembled matrix (violation > 1e-9 relative -> numerical_error). Requires
// 2n + k2 - k1 >= 0 and sys.degree >= max(T, n).
PartitionResult partition_pf(const OrthogonalSystem& sys, const EnsembleParams& params,
                             const FlavorSet& flavors);

// ---------- generic unitary-invariant route (measure on the whole real line) ----------

// Weight w(z) = exp(-U(z)) on R with U(z) = sum_m potential[m-1] z^m; the
// leading degree must be even with positive coefficient so all moments exist.
struct GenericMeasure {
  std::vector<double> potential{0.0, 1.0};  // default U(z) = z^2 (Hermite weight)

  void validate() const;
  bool is_hermite() const;  // exactly U(z) = z^2
};

// Monic orthogonal polynomials t_0..t_J of the generic measure with norms g_j
// and recurrence t_{j+1} = (z - a_j) t_j - b_j t_{j-1}.
struct GenericOrthogonalSystem {
  GenericMeasure measure;
  int degree = 0;
  std::vector<double> rec_a;
  std::vector<double> rec_b;
  std::vector<double> norms;
};

// Stieltjes construction over the whole real line (J <= 20).
GenericOrthogonalSystem build_generic_system(const GenericMeasure& m, int J);

// Closed-form monic Hermite data for U(z) = z^2: a_j = 0, b_j = j/2,
// g_j = j! sqrt(pi) / 2^j.
GenericOrthogonalSystem hermite_closed_form(int J);

double eval_t(const GenericOrthogonalSystem& gsys, int j, double z);
cplx eval_t(const GenericOrthogonalSystem& gsys, int j, cplx z);

// Cauchy transforms that_0..that_jmax at u (off the real axis): that_0 by
// direct quadrature over R, then the monic upward recurrence with the +g_0
// inhomogeneity at the first step.
std::vector<cplx> generic_cauchy_table(const GenericOrthogonalSystem& gsys, cplx u,
                                       int jmax, double eps_axis = 1e-8);

// Z_{k1/k2}/Z_{0/0} for the generic measure: same Pfaffian skeleton as
// partition_pf with p_j(kappa^2) -> t_j(kappa), phat -> that, h -> g, and
// principal square roots sqrt(kappa) in the explicit antisymmetrizing factors
// and the Berezinian. N is the number of eigenvalues.
PartitionResult partition_generic_pf(const GenericMeasure& measure, int N,
                                     const FlavorSet& flavors);

// ---------- k-point correlation functions ----------

// R_k(x_1..x_k) = prod_a[x_a^{2nu+1} e^{-alpha V(x_a^2)}] * det[S_n(x_a, x_b)]
// with the Christoffel-Darboux sum S_n; normalization fixed by int R_1 = n.
// Requires x_a > 0 pairwise distinct, k = |x| <= n, sys.degree >= n - 1.
double kpoint_det(const OrthogonalSystem& sys, const EnsembleParams& params,
                  const std::vector<double>& x, int k);

// Same R_k through the 2k x 2k Pfaffian of the antisymmetrized two-point
// kernel; internally verifies Pf^2 = 2^{2k} (prod x_a)^2 det^2[Zbar]
// (violation > 1e-8 -> numerical_error) before returning.
double kpoint_pf(const OrthogonalSystem& sys, const EnsembleParams& params,
                 const std::vector<double>& x, int k);

FlavorSet flavors_from_json(const std::string& text);
std::string flavors_to_json(const FlavorSet& f);

}  // namespace pfrmt

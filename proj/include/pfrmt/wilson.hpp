#pragma once
// Wilson-Dirac application: the finite-lattice-spacing deformation of the
// fermionic microscopic partition functions.
//
// The two-flavor building block is a 2-D Gaussian integral of the
// chiral-limit J-kernel over s_j = i m_j + (Gaussian of width sqrt(2) a_hat):
//
//   Z2(m1, m2) = (2 a_hat)^2 / (m1 - m2) *
//       IntInt e^{-t1^2 - t2^2} CD(2 a_hat t1 + i m1, 2 a_hat t2 + i m2) dt1 dt2
//   CD(s1, s2) = [s1 J_{nu-1}(s1) J_nu(s2) - s2 J_nu(s1) J_{nu-1}(s2)] / (s1 + s2)
//
// evaluated by Gauss-Hermite quadrature after the exact shift of each
// integration line onto its Gaussian center (the integrand is entire in
// both variables and Gaussian-suppressed, so the shift is an identity).
// The s1 + s2 = 0 line of CD is a removable singularity (the numerator
// vanishes there by the J-recurrence); near it the kernel is evaluated by a
// symmetric two-point average.
//
// For N_f (even) flavors the partition function is the normalized Pfaffian
//
//   Z_{N_f} = Pf[ (m_j - m_i) Z2(m_j, m_i) ] / prod_{i<j} (m_j - m_i),
//
// which for N_f = 2 reduces to Z2 itself and is exactly invariant under
// mass permutations.  As a_hat -> 0 the ratio to the continuum value
// micro_partition_pf(nu, {}, {i m_1, ..., i m_Nf}) becomes mass-independent.
//
// Values are returned as complex: for N_f = 2 the result is purely
// imaginary in this normalization (it is i times a real number), so a real
// return type would silently discard the value.

#include <vector>

#include "pfrmt/common.hpp"
#include "pfrmt/linalg.hpp"

namespace pfrmt {

struct WilsonParams {
  long nu = 0;             // topological index, >= 0
  double a_hat = 0.1;      // scaled lattice spacing, > 0
  std::vector<double> masses; // scaled quark masses, pairwise distinct

  // Throws validation_error on: nu < 0, a_hat <= 0 or non-finite, non-finite
  // masses, or masses closer than the relative separation scale.
  void validate() const;
};

// Two-flavor building block; p supplies (nu, a_hat), the masses are explicit
// so the Pfaffian assembly can call it for every pair.  nodes is the
// Gauss-Hermite order per axis (default matches the pinned accuracy of the
// frozen anchors; refinement stability is a tested invariant).
cplx z2_wilson(const WilsonParams& p, double m1, double m2, int nodes = 80);

// N_f-flavor partition function via the normalized Pfaffian.  Requires even
// N_f >= 2 and pairwise-distinct masses.
cplx zNf_wilson(const WilsonParams& p, int nodes = 80);

// Everything the CLI emits for a wilson run: the value, the antisymmetric
// entry matrix A_ij = (m_j - m_i) Z2(m_j, m_i), the permutation-invariance
// residual |Z(reversed masses)/Z - 1|, and the continuum ratio
// Z / micro_partition_pf(nu, {}, {i m}).
struct WilsonReport {
  cplx value{0.0, 0.0};
  CMat entries;
  double permutation_residual = 0.0;
  cplx continuum_ratio{0.0, 0.0};
};

WilsonReport wilson_report(const WilsonParams& p, int nodes = 80);

} // namespace pfrmt

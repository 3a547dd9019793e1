#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pfrmt/common.hpp"
#include "pfrmt/ensemble.hpp"
#include "pfrmt/linalg.hpp"
#include "pfrmt/partition.hpp"

namespace pfrmt {

// Counter-based block cipher core (Philox-4x32, 10 rounds). A fixed
// (counter, key) pair produces the same 128-bit block on every platform, so
// Monte Carlo sub-streams indexed through the counter words are reproducible
// independent of scheduling or worker count.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

struct McConfig {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  // Samples per deterministic sub-stream; 0 selects samples/100 (at least 1).
  // Results are bit-identical for fixed (samples, seed, chunk).
  std::uint64_t chunk = 0;

  void validate() const;
  std::uint64_t chunk_size() const;
};

// One Monte Carlo draw of the n x (n+nu) complex Gaussian matrix W with
// E|W_ab|^2 = 1/alpha (Gaussian potential only; other potentials are the
// quadrature oracle's job). Entry randomness is a pure function of
// (seed, chunk_index, index_in_chunk, entry index).
CMat sample_matrix(const EnsembleParams& params, std::uint64_t seed,
                   std::uint64_t chunk_index, std::uint64_t index_in_chunk);

// Sample mean of prod_f det(D - i kappa_f) / prod_b det(D - i kappa_b) over
// draws of D = [[0, W], [-W^dag, 0]]; equals Z_{k1/k2}/Z_{0/0} including the
// (-i kappa)^nu zero-mode prefactors. Jackknife stderr over chunks; the
// warning flag is set when stderr exceeds |mean| (heavy-tailed bosonic case).
PartitionResult mc_partition(const EnsembleParams& params, const FlavorSet& flavors,
                             const McConfig& cfg);

// Direct nested adaptive quadrature of the eigenvalue representation over
// [0, inf)^n (n <= 3): ratio factors against the squared Vandermonde times
// the weight, normalized by the flavorless integral, times the
// (-i kappa)^nu prefactor. The nested tolerance ladder is pinned internally;
// outer_tol > 0 replaces the outermost relative tolerance (0 keeps the
// default, whose outermost entry is 1e-9 for n = 3).
PartitionResult quad_partition(const EnsembleParams& params, const FlavorSet& flavors,
                               double outer_tol = 0.0);

// R_k(x_1..x_k) by direct (n-k)-fold integration of the joint eigenvalue
// density with x inserted (k <= n <= 3), normalized so that int R_1 = n.
// outer_tol as in quad_partition (applies to each nested integral performed).
double quad_kpoint(const EnsembleParams& params, const std::vector<double>& x, int k,
                   double outer_tol = 0.0);

// Ensemble average of prod_a prod_f(z_a - kappa_f)/prod_b(z_a - kappa_b)
// against the squared Vandermonde times exp(-sum U(z_a)) over R^N (N <= 3),
// normalized by the flavorless integral. Ground truth for
// partition_generic_pf. outer_tol as in quad_partition.
PartitionResult quad_generic_partition(const GenericMeasure& measure, int N,
                                       const FlavorSet& flavors, double outer_tol = 0.0);

}  // namespace pfrmt

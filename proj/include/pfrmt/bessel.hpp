#pragma once
// Integer-order Bessel functions J_n and modified K_n, real and complex
// arguments, tuned for the accuracy window this library needs
// (relative error < 1e-12 for 0 < x <= 50, |order| <= 8).
//
// Domains:
//   bessel_j(n, x)  : real x >= 0 (x < 0 -> validation_error).
//   bessel_k(n, x)  : real x > 0  (x <= 0 -> validation_error).
//   bessel_j(n, z)  : complex z with |z| < 14 (series window), else
//                     validation_error.  Purely real z >= 0 of any size is
//                     routed through the real implementation.
//   bessel_k(n, z)  : complex z != 0 with |z| < 2.5 (series window) or
//                     Re z > 0 (integral window), else validation_error.
// Negative orders map through the parity identities
//   J_{-n} = (-1)^n J_n,   K_{-n} = K_n.
//
// bessel_j_ref / bessel_k_ref are slow, independent quadrature oracles
// (different integral representations) used only by tests to validate the
// fast implementations; they are exported so the acceptance binary can call
// them too.

#include "pfrmt/common.hpp"

namespace pfrmt {

double bessel_j(long n, double x);
double bessel_k(long n, double x);

cplx bessel_j(long n, cplx z);
cplx bessel_k(long n, cplx z);

// Quadrature oracles (tests only; ~1e-12 accurate, much slower).
//   j_ref: (1/pi) * Int_0^pi cos(n*t - x*sin t) dt
//   k_ref: sqrt(pi/(2x)) e^{-x} / Gamma(n+1/2) *
//          2 * Int_0^inf e^{-u^2} u^{2n} (1 + u^2/(2x))^{n-1/2} du
double bessel_j_ref(long n, double x);
double bessel_k_ref(long n, double x);

} // namespace pfrmt

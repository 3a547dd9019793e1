#include "pfrmt/bessel.hpp"

#include "pfrmt/quadrature.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace pfrmt {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

using ldbl = long double;
using lcplx = std::complex<long double>;

// ---------------------------------------------------------------- real J --

// Ascending series, long double accumulation.  Accurate (all terms of one
// sign pattern, cancellation bounded by ~ e^{x}) for moderate x; used for
// x < 12 where the largest term is ~ 1e4 and double targets hold easily.
double j_series(long n, double x) {
    const ldbl half = static_cast<ldbl>(x) / 2.0L;
    const ldbl q = half * half;
    ldbl term = 1.0L;
    for (long k = 1; k <= n; ++k) term *= half / static_cast<ldbl>(k);
    ldbl sum = term;
    ldbl peak = term < 0 ? -term : term;
    for (long k = 0; k < 400; ++k) {
        term *= -q / (static_cast<ldbl>(k + 1) * static_cast<ldbl>(n + k + 1));
        sum += term;
        const ldbl at = term < 0 ? -term : term;
        if (at > peak) peak = at;
        // Relative to the peak term, not to 1: when J_n itself is tiny (small
        // x, larger n) every term is tiny and an absolute cutoff truncates
        // while the tail still matters relative to the sum.
        if (at < 1e-22L * peak) break;
    }
    return static_cast<double>(sum);
}

// Miller downward recurrence with Neumann-series normalization
// J_0 + 2*(J_2 + J_4 + ...) = 1; stable for all x, used for x >= 12.
double j_miller(long n, double x) {
    const long m0 = std::max<long>(n, static_cast<long>(std::ceil(x))) + 40;
    long m = m0 + (m0 % 2); // even start so the sum bookkeeping is simple
    ldbl fp1 = 0.0L;        // f_{m+1}
    ldbl f = 1e-30L;        // f_m (arbitrary seed)
    ldbl norm = 0.0L;
    ldbl save = 0.0L;
    bool saved = false;
    for (long k = m; k >= 1; --k) {
        ldbl fm1 = (2.0L * static_cast<ldbl>(k) / static_cast<ldbl>(x)) * f - fp1;
        fp1 = f;
        f = fm1;
        if (k - 1 == n) {
            save = f;
            saved = true;
        }
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0L * f;
        const ldbl af = f < 0 ? -f : f;
        if (af > 1e30L) {
            f *= 1e-30L;
            fp1 *= 1e-30L;
            norm *= 1e-30L;
            if (saved) save *= 1e-30L;
        }
    }
    norm += f; // J_0 contribution
    (void)saved;
    return static_cast<double>(save / norm);
}

// ---------------------------------------------------------------- real K --

// Modified Bessel I_n ascending series (all-positive terms; exact domain of
// use is x < 2 inside k_series, where it converges in a few terms).
ldbl i_series(long n, ldbl x) {
    const ldbl half = x / 2.0L;
    const ldbl q = half * half;
    ldbl term = 1.0L;
    for (long k = 1; k <= n; ++k) term *= half / static_cast<ldbl>(k);
    ldbl sum = term;
    for (long k = 0; k < 200; ++k) {
        term *= q / (static_cast<ldbl>(k + 1) * static_cast<ldbl>(n + k + 1));
        sum += term;
        if (term < 1e-24L * sum) break;
    }
    return sum;
}

// K_n ascending series (Abramowitz & Stegun 9.6.11), x < 2.
double k_series(long n, double x) {
    const ldbl xl = static_cast<ldbl>(x);
    const ldbl half = xl / 2.0L;
    const ldbl q = half * half;
    const ldbl lh = std::log(half);

    // finite sum: (1/2) (x/2)^{-n} sum_{k=0}^{n-1} (n-k-1)!/k! (-q)^k
    ldbl finite = 0.0L;
    if (n > 0) {
        // t_k = (n-k-1)!/k! (-q)^k ; t_0 = (n-1)!
        ldbl t = 1.0L;
        for (long j = 1; j < n; ++j) t *= static_cast<ldbl>(j);
        ldbl pw = 1.0L; // (x/2)^{-n} built via division at the end
        for (long j = 0; j < n; ++j) pw *= half;
        ldbl s = 0.0L;
        for (long k = 0; k < n; ++k) {
            s += t;
            if (k + 1 < n) {
                t *= -q / (static_cast<ldbl>(k + 1));
                t /= static_cast<ldbl>(n - k - 1);
            }
        }
        finite = 0.5L * s / pw;
    }

    // log term: (-1)^{n+1} ln(x/2) I_n(x)
    const ldbl sgn = (n % 2 == 0) ? -1.0L : 1.0L;
    const ldbl logterm = sgn * lh * i_series(n, xl);

    // psi series: (-1)^n (1/2) (x/2)^n sum_k [psi(k+1)+psi(n+k+1)] q^k/(k!(n+k)!)
    ldbl psi1 = -static_cast<ldbl>(kEulerGamma); // psi(1)
    ldbl psi2 = psi1;                            // will become psi(n+1)
    for (long j = 1; j <= n; ++j) psi2 += 1.0L / static_cast<ldbl>(j);
    ldbl term = 1.0L; // q^k/(k!(n+k)!) * (x/2)^n, k = 0
    for (long j = 1; j <= n; ++j) term *= half / static_cast<ldbl>(j);
    ldbl psisum = (psi1 + psi2) * term;
    for (long k = 0; k < 200; ++k) {
        term *= q / (static_cast<ldbl>(k + 1) * static_cast<ldbl>(n + k + 1));
        psi1 += 1.0L / static_cast<ldbl>(k + 1);
        psi2 += 1.0L / static_cast<ldbl>(n + k + 1);
        const ldbl add = (psi1 + psi2) * term;
        psisum += add;
        const ldbl aa = add < 0 ? -add : add;
        const ldbl as = psisum < 0 ? -psisum : psisum;
        if (aa < 1e-24L * (as > 1.0L ? as : 1.0L)) break;
    }
    const ldbl sgn2 = (n % 2 == 0) ? 1.0L : -1.0L;
    return static_cast<double>(finite + logterm + sgn2 * 0.5L * psisum);
}

// K_n(x) = Int_0^inf e^{-x cosh t} cosh(n t) dt, truncated where the
// envelope e^{n t - x cosh t} underflows; x >= 2.
double k_integral(long n, double x) {
    // x cosh T = 745 marks double underflow of the envelope; cosh(nT) adds
    // n*T which is tiny next to x cosh T in this regime (x >= 2, n <= ~64).
    const double target = 745.0 / x;
    const double T = (target > 1.0 ? std::acosh(target) : 0.0) + 1.5;
    auto f = [n, x](double t) -> cplx {
        const double c = std::cosh(t);
        const double e = x * c;
        if (e > 745.0) return cplx(0.0, 0.0);
        const double w = std::exp(-e);
        return cplx(std::cosh(static_cast<double>(n) * t) * w, 0.0);
    };
    return require_converged(integrate_adaptive(f, 0.0, T, 1e-13, 1e-280), "bessel_k integral")
        .real();
}

// ------------------------------------------------------------- complex J --

cplx j_series_c(long n, cplx z) {
    const lcplx half = lcplx(z.real(), z.imag()) / 2.0L;
    const lcplx q = half * half;
    lcplx term = 1.0L;
    for (long k = 1; k <= n; ++k) term *= half / static_cast<ldbl>(k);
    lcplx sum = term;
    ldbl peak = std::abs(term);
    for (long k = 0; k < 600; ++k) {
        term *= -q / (static_cast<ldbl>(k + 1) * static_cast<ldbl>(n + k + 1));
        sum += term;
        const ldbl at = std::abs(term);
        if (at > peak) peak = at;
        if (at < 1e-24L * peak) break; // relative to peak term (see j_series)
    }
    return cplx(static_cast<double>(sum.real()), static_cast<double>(sum.imag()));
}

// ------------------------------------------------------------- complex K --

lcplx i_series_c(long n, lcplx z) {
    const lcplx half = z / 2.0L;
    const lcplx q = half * half;
    lcplx term = 1.0L;
    for (long k = 1; k <= n; ++k) term *= half / static_cast<ldbl>(k);
    lcplx sum = term;
    for (long k = 0; k < 300; ++k) {
        term *= q / (static_cast<ldbl>(k + 1) * static_cast<ldbl>(n + k + 1));
        sum += term;
        if (std::abs(term) < 1e-24L * std::abs(sum)) break;
    }
    return sum;
}

cplx k_series_c(long n, cplx zc) {
    const lcplx z(zc.real(), zc.imag());
    const lcplx half = z / 2.0L;
    const lcplx q = half * half;
    const lcplx lh = std::log(half); // principal branch

    lcplx finite = 0.0L;
    if (n > 0) {
        ldbl t0 = 1.0L;
        for (long j = 1; j < n; ++j) t0 *= static_cast<ldbl>(j);
        lcplx pw = 1.0L;
        for (long j = 0; j < n; ++j) pw *= half;
        lcplx t = t0;
        lcplx s = 0.0L;
        for (long k = 0; k < n; ++k) {
            s += t;
            if (k + 1 < n) {
                t *= -q / static_cast<ldbl>(k + 1);
                t /= static_cast<ldbl>(n - k - 1);
            }
        }
        finite = 0.5L * s / pw;
    }

    const ldbl sgn = (n % 2 == 0) ? -1.0L : 1.0L;
    const lcplx logterm = sgn * lh * i_series_c(n, z);

    ldbl psi1 = -static_cast<ldbl>(kEulerGamma);
    ldbl psi2 = psi1;
    for (long j = 1; j <= n; ++j) psi2 += 1.0L / static_cast<ldbl>(j);
    lcplx term = 1.0L;
    for (long j = 1; j <= n; ++j) term *= half / static_cast<ldbl>(j);
    lcplx psisum = (psi1 + psi2) * term;
    for (long k = 0; k < 300; ++k) {
        term *= q / (static_cast<ldbl>(k + 1) * static_cast<ldbl>(n + k + 1));
        psi1 += 1.0L / static_cast<ldbl>(k + 1);
        psi2 += 1.0L / static_cast<ldbl>(n + k + 1);
        const lcplx add = (psi1 + psi2) * term;
        psisum += add;
        if (std::abs(add) < 1e-24L * std::max<ldbl>(1.0L, std::abs(psisum))) break;
    }
    const ldbl sgn2 = (n % 2 == 0) ? 1.0L : -1.0L;
    const lcplx out = finite + logterm + sgn2 * 0.5L * psisum;
    return cplx(static_cast<double>(out.real()), static_cast<double>(out.imag()));
}

// K_n(z) = Int_0^inf e^{-z cosh t} cosh(n t) dt for Re z > 0.
cplx k_integral_c(long n, cplx z) {
    const double xr = z.real();
    const double target = 745.0 / xr;
    const double T = (target > 1.0 ? std::acosh(target) : 0.0) + 1.5;
    auto f = [n, z](double t) -> cplx {
        const double c = std::cosh(t);
        if (z.real() * c > 745.0) return cplx(0.0, 0.0);
        return std::exp(-z * c) * std::cosh(static_cast<double>(n) * t);
    };
    return require_converged(integrate_adaptive(f, 0.0, T, 1e-13, 1e-280), "bessel_k integral");
}

} // namespace

// ------------------------------------------------------------ public API --

double bessel_j(long n, double x) {
    if (!(x >= 0.0) || !std::isfinite(x))
        throw validation_error("bessel_j: real argument must be finite and >= 0");
    double sign = 1.0;
    if (n < 0) { // J_{-n} = (-1)^n J_n
        sign = (n % 2 != 0) ? -1.0 : 1.0;
        n = -n;
    }
    if (x == 0.0) return n == 0 ? sign : 0.0;
    return sign * (x < 12.0 ? j_series(n, x) : j_miller(n, x));
}

double bessel_k(long n, double x) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw validation_error("bessel_k: real argument must be finite and > 0");
    if (n < 0) n = -n; // K_{-n} = K_n
    return x < 2.0 ? k_series(n, x) : k_integral(n, x);
}

cplx bessel_j(long n, cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw validation_error("bessel_j: complex argument must be finite");
    if (z.imag() == 0.0 && z.real() >= 0.0) return cplx(bessel_j(n, z.real()), 0.0);
    if (std::abs(z) >= 14.0)
        throw validation_error("bessel_j: complex argument outside series window |z| < 14");
    cplx sign = 1.0;
    if (n < 0) {
        sign = (n % 2 != 0) ? -1.0 : 1.0;
        n = -n;
    }
    if (z == cplx(0.0, 0.0)) return n == 0 ? sign : cplx(0.0, 0.0);
    return sign * j_series_c(n, z);
}

cplx bessel_k(long n, cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw validation_error("bessel_k: complex argument must be finite");
    if (z == cplx(0.0, 0.0)) throw validation_error("bessel_k: argument must be nonzero");
    if (z.imag() == 0.0 && z.real() > 0.0) return cplx(bessel_k(n, z.real()), 0.0);
    if (n < 0) n = -n;
    if (std::abs(z) < 2.5) return k_series_c(n, z);
    if (z.real() > 0.0) return k_integral_c(n, z);
    throw validation_error("bessel_k: complex argument outside supported domain "
                           "(need |z| < 2.5 or Re z > 0)");
}

// --------------------------------------------------------- test oracles --

double bessel_j_ref(long n, double x) {
    if (!(x >= 0.0)) throw validation_error("bessel_j_ref: argument must be >= 0");
    double sign = 1.0;
    if (n < 0) {
        sign = (n % 2 != 0) ? -1.0 : 1.0;
        n = -n;
    }
    constexpr double pi = 3.14159265358979323846;
    auto f = [n, x](double t) -> cplx {
        return cplx(std::cos(static_cast<double>(n) * t - x * std::sin(t)), 0.0);
    };
    // Oscillatory integrand: panel roundoff puts a ~1e-14 absolute floor on
    // the error estimate when the integral nearly cancels (tiny J values), so
    // the oracle guarantees abs error < 5e-14 and rel error < 1e-12 otherwise.
    const cplx v = require_converged(integrate_adaptive(f, 0.0, pi, 1e-12, 5e-14), "bessel_j_ref");
    return sign * v.real() / pi;
}

double bessel_k_ref(long n, double x) {
    if (!(x > 0.0)) throw validation_error("bessel_k_ref: argument must be > 0");
    if (n < 0) n = -n;
    constexpr double pi = 3.14159265358979323846;
    const double nu = static_cast<double>(n);
    // sqrt(pi/2x) e^{-x} / Gamma(n+1/2) * 2 Int_0^inf e^{-u^2} u^{2n} (1+u^2/(2x))^{n-1/2} du
    auto f = [nu, x](double u) -> cplx {
        const double u2 = u * u;
        if (u2 > 700.0) return cplx(0.0, 0.0);
        const double v =
            std::exp(-u2) * std::pow(u, 2.0 * nu) * std::pow(1.0 + u2 / (2.0 * x), nu - 0.5);
        return cplx(v, 0.0);
    };
    const cplx integral = require_converged(integrate_semiinf(f, 1e-13, 1e-280), "bessel_k_ref");
    const double pref = std::sqrt(pi / (2.0 * x)) * std::exp(-x) / std::tgamma(nu + 0.5);
    return pref * 2.0 * integral.real();
}

} // namespace pfrmt

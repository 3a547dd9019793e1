#include "pfrmt/microscopic.hpp"

#include "pfrmt/bessel.hpp"
#include "pfrmt/linalg.hpp"
#include "pfrmt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pfrmt {

namespace {

double sep_scale(cplx a, cplx b) {
    return 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

// J/J kernel; removable diagonal.
cplx kernel_i1(long nu, cplx a, cplx b) {
    if (a == b)
        return (bessel_j(nu + 1, a) * bessel_j(nu - 1, a) - bessel_j(nu, a) * bessel_j(nu, a)) /
               2.0;
    return (a * bessel_j(nu - 1, a) * bessel_j(nu, b) - b * bessel_j(nu, a) * bessel_j(nu - 1, b)) /
           (a * a - b * b);
}

// K/J kernel (a carries the K's); genuine pole at a^2 == b^2, no diagonal.
cplx kernel_i2(long nu, cplx a, cplx b) {
    return (a * bessel_k(nu - 1, a) * bessel_j(nu, b) - b * bessel_k(nu, a) * bessel_j(nu - 1, b)) /
           (a * a - b * b);
}

// K/K kernel; removable diagonal.
cplx kernel_i3(long nu, cplx a, cplx b) {
    if (a == b)
        return (bessel_k(nu + 1, a) * bessel_k(nu - 1, a) - bessel_k(nu, a) * bessel_k(nu, a)) /
               2.0;
    return (a * bessel_k(nu - 1, a) * bessel_k(nu, b) - b * bessel_k(nu, a) * bessel_k(nu - 1, b)) /
           (a * a - b * b);
}

std::vector<cplx> squares_of(const std::vector<cplx>& v) {
    std::vector<cplx> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] * v[i];
    return out;
}

// Pairwise-distinct squares within and across both groups: every kernel
// denominator in either route is a difference of squares.
void validate_micro_flavors(long nu, const FlavorSet& flavors) {
    if (nu < 0) throw validation_error("microscopic: nu must be a non-negative integer");
    std::vector<cplx> all;
    all.reserve(flavors.bosonic.size() + flavors.fermionic.size());
    for (cplx z : flavors.bosonic) all.push_back(z);
    for (cplx z : flavors.fermionic) all.push_back(z);
    double amax = 1.0;
    for (cplx z : all) amax = std::max(amax, std::abs(z) * std::abs(z));
    const double eps = 1e-9 * amax;
    for (size_t i = 0; i < all.size(); ++i)
        for (size_t j = i + 1; j < all.size(); ++j)
            if (std::abs(all[i] * all[i] - all[j] * all[j]) <= eps)
                throw validation_error(
                    "microscopic: squared flavor arguments must be pairwise distinct");
}

} // namespace

cplx kernel_I(int which, long nu, cplx a, cplx b) {
    if (which < 1 || which > 3) throw validation_error("kernel_I: which must be 1, 2 or 3");
    if (nu < 0) throw validation_error("kernel_I: nu must be a non-negative integer");
    if (which == 2) {
        const double s2 = 1e-9 * std::max({1.0, std::abs(a * a), std::abs(b * b)});
        if (std::abs(a * a - b * b) <= s2)
            throw validation_error("kernel_I: which=2 has a pole at a^2 == b^2");
        return kernel_i2(nu, a, b);
    }
    // Removable diagonal: taken only on exact equality; a near-miss is
    // ambiguous (caller may want the off-diagonal value arbitrarily close to
    // the pole of each separate term), so it must be resolved explicitly.
    if (a != b && std::abs(a - b) <= sep_scale(a, b))
        throw validation_error(
            "kernel_I: |a - b| below separation scale; pass a == b for the diagonal "
            "branch or separate the arguments");
    return which == 1 ? kernel_i1(nu, a, b) : kernel_i3(nu, a, b);
}

cplx micro_partition_det(long nu, const FlavorSet& flavors, const DetSplit& split) {
    validate_micro_flavors(nu, flavors);
    const std::vector<cplx>& B = flavors.bosonic;
    const std::vector<cplx>& F = flavors.fermionic;
    const long k1 = static_cast<long>(B.size());
    const long k2 = static_cast<long>(F.size());
    const long l11 = split.l11;
    const long l21 = split.l21;
    if (l11 < 0 || l11 > k1 || l21 < 0 || l21 > k2)
        throw validation_error("micro_partition_det: split out of range");
    const long dlt = k2 - k1 + 2 * l11 - 2 * l21;
    if (dlt < 0)
        throw validation_error(
            "micro_partition_det: need k2 - k1 + 2*l11 - 2*l21 >= 0 (border row count)");
    if (k1 + k2 == 0) return cplx(1.0, 0.0);

    const std::vector<cplx> B1(B.begin(), B.begin() + l11);
    const std::vector<cplx> B2(B.begin() + l11, B.end());
    const std::vector<cplx> F1(F.begin(), F.begin() + l21);
    const std::vector<cplx> F2(F.begin() + l21, F.end());
    const long rows = l21 + (k1 - l11) + dlt;
    const long cols = (k2 - l21) + l11;
    if (rows != cols) throw validation_error("micro_partition_det: split is not square");

    CMat M = CMat::Zero(rows, cols);
    for (long a = 0; a < l21; ++a) {
        for (long b = 0; b < k2 - l21; ++b) M(a, b) = kernel_i1(nu, F1[a], F2[b]);
        for (long b = 0; b < l11; ++b) M(a, (k2 - l21) + b) = kernel_i2(nu, B1[b], F1[a]);
    }
    for (long a = 0; a < k1 - l11; ++a) {
        for (long b = 0; b < k2 - l21; ++b) M(l21 + a, b) = kernel_i2(nu, B2[a], F2[b]);
        for (long b = 0; b < l11; ++b) M(l21 + a, (k2 - l21) + b) = kernel_i3(nu, B2[a], B1[b]);
    }
    // Monomial-Bessel border: successive rows alternate the Bessel order
    // nu, nu-1, nu, nu-1, ... while the monomial power grows.  (Equivalent to
    // a fixed-order nu+a border up to row operations; this form is the one
    // the normalization below is pinned to.)
    for (long a = 0; a < dlt; ++a) {
        const long r = l21 + (k1 - l11) + a;
        const long ord = nu - (a % 2);
        for (long b = 0; b < k2 - l21; ++b)
            M(r, b) = pow_int(F2[b], a) * bessel_j(ord, F2[b]);
        for (long b = 0; b < l11; ++b)
            M(r, (k2 - l21) + b) = pow_int(B1[b], a) * bessel_k(ord, B1[b]);
    }

    const cplx norm = detail::berezinian_rev(squares_of(B1), squares_of(F1)) *
                      detail::berezinian_rev(squares_of(B2), squares_of(F2));
    return M.determinant() / norm;
}

cplx micro_partition_pf(long nu, const FlavorSet& flavors) {
    validate_micro_flavors(nu, flavors);
    const std::vector<cplx>& B = flavors.bosonic;
    const std::vector<cplx>& F = flavors.fermionic;
    const long k1 = static_cast<long>(B.size());
    const long k2 = static_cast<long>(F.size());
    if (k1 + k2 == 0) return cplx(1.0, 0.0);

    const long o = (k1 + k2) % 2;
    const long dim = o + k1 + k2;
    CMat K = CMat::Zero(dim, dim);
    if (o) {
        for (long a = 0; a < k2; ++a) {
            K(0, o + a) = bessel_j(nu, F[a]);
            K(o + a, 0) = -K(0, o + a);
        }
        for (long b = 0; b < k1; ++b) {
            K(0, o + k2 + b) = bessel_k(nu, B[b]);
            K(o + k2 + b, 0) = -K(0, o + k2 + b);
        }
    }
    // Both triangles of the ff and bb blocks are evaluated independently from
    // the displayed formulas; their agreement is the antisymmetry check the
    // contract requires (the formulas are antisymmetric analytically, so any
    // residual is numerical).
    for (long a = 0; a < k2; ++a)
        for (long b = 0; b < k2; ++b) {
            if (a == b) continue;
            K(o + a, o + b) = (F[a] - F[b]) * kernel_i1(nu, F[a], F[b]);
        }
    for (long a = 0; a < k2; ++a)
        for (long b = 0; b < k1; ++b) {
            K(o + a, o + k2 + b) = (B[b] + F[a]) * kernel_i2(nu, B[b], F[a]);
            K(o + k2 + b, o + a) = -K(o + a, o + k2 + b);
        }
    for (long a = 0; a < k1; ++a)
        for (long b = 0; b < k1; ++b) {
            if (a == b) continue;
            K(o + k2 + a, o + k2 + b) = -(B[a] - B[b]) * kernel_i3(nu, B[a], B[b]);
        }

    double scale = 1.0, asym = 0.0;
    for (long i = 0; i < dim; ++i)
        for (long j = 0; j < dim; ++j) {
            scale = std::max(scale, std::abs(K(i, j)));
            asym = std::max(asym, std::abs(K(i, j) + K(j, i)));
        }
    if (asym > 1e-9 * scale)
        throw numerical_error("micro_partition_pf: kernel matrix failed antisymmetry check");

    const cplx pf = pfaffian_checked(K, 1e-9).value;
    const cplx norm = detail::berezinian_rev(B, F); // unsquared arguments
    // Flavor-count constant pinning the Pfaffian normalization to the
    // determinant route's.
    return parity_sign(choose2(k2)) * pf / norm;
}

// --- convergence studies -------------------------------------------------

namespace {

// Orthonormal Laguerre-family value P_n(y) by upward recurrence.
double ortho_p(long n, long nu, double alpha, double y) {
    const double h0 = std::tgamma(static_cast<double>(nu) + 1.0) /
                      (2.0 * std::pow(alpha, static_cast<double>(nu) + 1.0));
    double pm1 = 0.0, p = 1.0 / std::sqrt(h0);
    for (long j = 0; j < n; ++j) {
        const double a = (2.0 * j + nu + 1.0) / alpha;
        const double bn = static_cast<double>(j + 1) * static_cast<double>(j + 1 + nu) /
                          (alpha * alpha);
        const double t = ((y - a) * p - (std::sqrt(static_cast<double>(j) * (j + nu)) / alpha) * pm1) /
                         std::sqrt(bn);
        pm1 = p;
        p = t;
    }
    return p;
}

// Orthonormal Cauchy-transform value Phat_n(u) for u < 0 (off support, no
// principal value): Phat_0 from direct quadrature, then the polynomial
// recurrence with the inhomogeneous sqrt(h0) term at j = 0.
double ortho_phat(long n, long nu, double alpha, double u) {
    const double h0 = std::tgamma(static_cast<double>(nu) + 1.0) /
                      (2.0 * std::pow(alpha, static_cast<double>(nu) + 1.0));
    auto f = [nu, alpha, u](double y) -> cplx {
        const double e = alpha * y;
        if (e > 700.0) return cplx(0.0, 0.0);
        return cplx(0.5 * std::pow(y, static_cast<double>(nu)) * std::exp(-e) / (y - u), 0.0);
    };
    const double ph0 =
        require_converged(integrate_semiinf(f, 1e-12, 1e-280), "convergence_study Phat_0").real();
    double pm1 = 0.0, p = ph0 / std::sqrt(h0);
    for (long j = 0; j < n; ++j) {
        const double a = (2.0 * j + nu + 1.0) / alpha;
        const double bn = static_cast<double>(j + 1) * static_cast<double>(j + 1 + nu) /
                          (alpha * alpha);
        const double extra = (j == 0) ? std::sqrt(h0) : 0.0;
        const double t = ((u - a) * p - (std::sqrt(static_cast<double>(j) * (j + nu)) / alpha) * pm1 +
                          extra) /
                         std::sqrt(bn);
        pm1 = p;
        p = t;
    }
    return p;
}

// (P_n, P_{n+1}) pair for the scaled Z_{0/2} block.
std::pair<double, double> ortho_p_pair(long n, long nu, double alpha, double y) {
    const double h0 = std::tgamma(static_cast<double>(nu) + 1.0) /
                      (2.0 * std::pow(alpha, static_cast<double>(nu) + 1.0));
    double pm1 = 0.0, p = 1.0 / std::sqrt(h0);
    for (long j = 0; j <= n; ++j) {
        const double a = (2.0 * j + nu + 1.0) / alpha;
        const double bn = static_cast<double>(j + 1) * static_cast<double>(j + 1 + nu) /
                          (alpha * alpha);
        const double t = ((y - a) * p - (std::sqrt(static_cast<double>(j) * (j + nu)) / alpha) * pm1) /
                         std::sqrt(bn);
        pm1 = p;
        p = t;
    }
    return {pm1, p}; // {P_n, P_{n+1}}
}

} // namespace

std::vector<ConvergencePoint> convergence_table(long nu, double alpha,
                                                const std::vector<double>& x_grid,
                                                const std::vector<long>& n_list) {
    if (nu < 0) throw validation_error("convergence_table: nu must be non-negative");
    if (!(alpha > 0.0)) throw validation_error("convergence_table: alpha must be positive");
    if (x_grid.empty() || n_list.empty())
        throw validation_error("convergence_table: x_grid and n_list must be nonempty");
    for (double x : x_grid)
        if (!(x > 0.0)) throw validation_error("convergence_table: x grid must be positive");
    for (long n : n_list)
        if (n < 1) throw validation_error("convergence_table: n values must be >= 1");

    std::vector<ConvergencePoint> out;
    out.reserve(n_list.size() * x_grid.size());
    for (long n : n_list) {
        const double neff = static_cast<double>(n) + (static_cast<double>(nu) + 1.0) / 2.0;
        // Analytic scaling constant for the polynomial limit: closed form in
        // (alpha, n, nu) from the Laguerre norms and leading coefficients.
        const double lf = n * std::log(alpha) - std::lgamma(static_cast<double>(n) + 1.0) -
                          nu * std::log(neff) - nu * std::log(2.0) +
                          0.5 * (std::lgamma(static_cast<double>(n) + 1.0) +
                                 std::lgamma(static_cast<double>(n + nu) + 1.0) -
                                 (2.0 * n + nu + 1.0) * std::log(alpha) - std::log(2.0));
        const double fac = parity_sign(n) * std::exp(lf);
        // Transform scaling pinned at the reference point x = 1.
        const double uref = -1.0 / (4.0 * alpha * neff);
        const double cpin = bessel_k(nu, 1.0) / ortho_phat(n, nu, alpha, uref);

        for (double x : x_grid) {
            ConvergencePoint pt;
            pt.n = n;
            pt.x = x;
            const double y = x * x / (4.0 * alpha * neff);
            const double target_j = bessel_j(nu, x) / std::pow(x, static_cast<double>(nu));
            pt.dev_p = std::fabs(fac * ortho_p(n, nu, alpha, y) / target_j - 1.0);
            const double target_k = std::pow(x, static_cast<double>(nu)) * bessel_k(nu, x);
            pt.dev_phat = std::fabs(cpin * ortho_phat(n, nu, alpha, -y) / target_k - 1.0);
            out.push_back(pt);
        }
    }
    return out;
}

std::vector<ConvergenceRow> convergence_study(long nu, double alpha,
                                              const std::vector<double>& x_grid,
                                              const std::vector<long>& n_list) {
    const std::vector<ConvergencePoint> table = convergence_table(nu, alpha, x_grid, n_list);
    std::vector<ConvergenceRow> out;
    out.reserve(n_list.size());
    for (const ConvergencePoint& pt : table) {
        if (out.empty() || out.back().n != pt.n) {
            ConvergenceRow row;
            row.n = pt.n;
            out.push_back(row);
        }
        out.back().dev_p = std::max(out.back().dev_p, pt.dev_p);
        out.back().dev_phat = std::max(out.back().dev_phat, pt.dev_phat);
    }
    return out;
}

double z02_scaled_finite_n(long nu, double alpha, long n, double x1, double x2) {
    if (nu < 0) throw validation_error("z02_scaled_finite_n: nu must be non-negative");
    if (!(alpha > 0.0)) throw validation_error("z02_scaled_finite_n: alpha must be positive");
    if (n < 1) throw validation_error("z02_scaled_finite_n: n must be >= 1");
    if (!(x1 > 0.0) || !(x2 > 0.0) || x1 == x2)
        throw validation_error("z02_scaled_finite_n: need distinct positive arguments");
    const double neff = static_cast<double>(n) + (static_cast<double>(nu) + 1.0) / 2.0;
    const double k1 = x1 / (2.0 * std::sqrt(alpha * neff));
    const double k2 = x2 / (2.0 * std::sqrt(alpha * neff));
    const double a = k1 * k1, b = k2 * k2;
    const auto [pa, pa1] = ortho_p_pair(n, nu, alpha, a);
    const auto [pb, pb1] = ortho_p_pair(n, nu, alpha, b);
    return pow_int(-k1 * k2, nu) * (pa1 * pb - pa * pb1) / (a - b);
}

} // namespace pfrmt

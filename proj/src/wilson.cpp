#include "pfrmt/wilson.hpp"

#include "pfrmt/bessel.hpp"
#include "pfrmt/microscopic.hpp"
#include "pfrmt/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace pfrmt {

namespace {

// Chiral-limit J-kernel with the removable s1 + s2 = 0 line: exactly on (or
// numerically indistinguishable from) the line, use the symmetric two-point
// average across it.
cplx cd_kernel(long nu, cplx s1, cplx s2) {
    const cplx d = s1 + s2;
    if (std::abs(d) > 1e-8 * (std::abs(s1) + std::abs(s2) + 1.0))
        return (s1 * bessel_j(nu - 1, s1) * bessel_j(nu, s2) -
                s2 * bessel_j(nu, s1) * bessel_j(nu - 1, s2)) /
               d;
    const double eps = 1e-5;
    return (cd_kernel(nu, s1, -s1 + eps) + cd_kernel(nu, s1, -s1 - eps)) / 2.0;
}

void require_distinct_masses(const std::vector<double>& m) {
    double scale = 1.0;
    for (double v : m) scale = std::max(scale, std::fabs(v));
    const double eps = 1e-9 * scale;
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = i + 1; j < m.size(); ++j)
            if (std::fabs(m[i] - m[j]) <= eps)
                throw validation_error("wilson: masses must be pairwise distinct");
}

CMat entries_matrix(const WilsonParams& p, const std::vector<double>& masses, int nodes) {
    const long nf = static_cast<long>(masses.size());
    CMat a = CMat::Zero(nf, nf);
    for (long i = 0; i < nf; ++i)
        for (long j = i + 1; j < nf; ++j) {
            a(i, j) = (masses[j] - masses[i]) * z2_wilson(p, masses[j], masses[i], nodes);
            a(j, i) = -a(i, j);
        }
    return a;
}

cplx znf_for_masses(const WilsonParams& p, const std::vector<double>& masses, int nodes) {
    const CMat a = entries_matrix(p, masses, nodes);
    cplx vdm = 1.0;
    for (size_t i = 0; i < masses.size(); ++i)
        for (size_t j = i + 1; j < masses.size(); ++j) vdm *= masses[j] - masses[i];
    return pfaffian_checked(a, 1e-9).value / vdm;
}

} // namespace

void WilsonParams::validate() const {
    if (nu < 0) throw validation_error("wilson: nu must be a non-negative integer");
    if (!(a_hat > 0.0) || !std::isfinite(a_hat))
        throw validation_error("wilson: a_hat must be positive and finite");
    for (double m : masses)
        if (!std::isfinite(m)) throw validation_error("wilson: masses must be finite");
    require_distinct_masses(masses);
}

cplx z2_wilson(const WilsonParams& p, double m1, double m2, int nodes) {
    if (p.nu < 0) throw validation_error("wilson: nu must be a non-negative integer");
    if (!(p.a_hat > 0.0) || !std::isfinite(p.a_hat))
        throw validation_error("wilson: a_hat must be positive and finite");
    if (nodes < 2) throw validation_error("wilson: quadrature order must be >= 2");
    if (!std::isfinite(m1) || !std::isfinite(m2))
        throw validation_error("wilson: masses must be finite");
    if (std::fabs(m1 - m2) <= 1e-9 * std::max({1.0, std::fabs(m1), std::fabs(m2)}))
        throw validation_error("wilson: z2 masses must be distinct (degenerate limit "
                               "requires explicit perturbation)");
    const QuadRule& gh = gauss_hermite(nodes);
    const double w2 = 2.0 * p.a_hat;
    // Each axis integrates e^{-(s - i m)^2 / 4 a^2} along the real s line;
    // the exact change of variable s = 2 a t + i m (valid because the
    // integrand is entire and Gaussian-bounded) turns it into the
    // Gauss-Hermite weight e^{-t^2}.
    cplx tot(0.0, 0.0);
    for (int i = 0; i < nodes; ++i) {
        const cplx s1(w2 * gh.x[i], m1);
        cplx row(0.0, 0.0);
        for (int j = 0; j < nodes; ++j) {
            const cplx s2(w2 * gh.x[j], m2);
            row += gh.w[j] * cd_kernel(p.nu, s1, s2);
        }
        tot += gh.w[i] * row;
    }
    return w2 * w2 * tot / (m1 - m2);
}

cplx zNf_wilson(const WilsonParams& p, int nodes) {
    p.validate();
    const size_t nf = p.masses.size();
    if (nf == 0 || nf % 2 != 0)
        throw validation_error("wilson: N_f must be even and >= 2");
    return znf_for_masses(p, p.masses, nodes);
}

WilsonReport wilson_report(const WilsonParams& p, int nodes) {
    p.validate();
    const size_t nf = p.masses.size();
    if (nf == 0 || nf % 2 != 0)
        throw validation_error("wilson: N_f must be even and >= 2");

    WilsonReport rep;
    rep.entries = entries_matrix(p, p.masses, nodes);
    cplx vdm = 1.0;
    for (size_t i = 0; i < nf; ++i)
        for (size_t j = i + 1; j < nf; ++j) vdm *= p.masses[j] - p.masses[i];
    rep.value = pfaffian_checked(rep.entries, 1e-9).value / vdm;

    std::vector<double> rev(p.masses.rbegin(), p.masses.rend());
    const cplx zrev = znf_for_masses(p, rev, nodes);
    rep.permutation_residual = std::abs(zrev / rep.value - 1.0);

    FlavorSet cont;
    for (double m : p.masses) cont.fermionic.push_back(cplx(0.0, m));
    rep.continuum_ratio = rep.value / micro_partition_pf(p.nu, cont);
    return rep;
}

} // namespace pfrmt

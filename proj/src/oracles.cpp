#include "pfrmt/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "pfrmt/quadrature.hpp"

namespace pfrmt {

// ---------- counter-based RNG ---------------------------------------------------

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0],
         static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1],
         static_cast<std::uint32_t>(p0)};
    k[0] += W0;
    k[1] += W1;
  }
  return c;
}

void McConfig::validate() const {
  if (samples < 1) throw validation_error("mc: samples must be >= 1");
  if (chunk > samples)
    throw validation_error("mc: chunk (samples per sub-stream) must be <= samples");
}

std::uint64_t McConfig::chunk_size() const {
  if (chunk > 0) return chunk;
  return std::max<std::uint64_t>(1, samples / 100);
}

namespace {

void require_gaussian(const EnsembleParams& params, const char* who) {
  if (params.potential != std::vector<double>{1.0})
    throw validation_error(std::string(who) +
                           ": only the Gaussian potential V(y) = y can be sampled "
                           "directly; use the quadrature oracle for general V");
}

}  // namespace

CMat sample_matrix(const EnsembleParams& params, std::uint64_t seed,
                   std::uint64_t chunk_index, std::uint64_t index_in_chunk) {
  params.validate();
  require_gaussian(params, "sample_matrix");
  if (chunk_index >> 32 || index_in_chunk >> 32)
    throw validation_error("sample_matrix: stream indices must fit in 32 bits");
  const int rows = params.n, cols = params.n + params.nu;
  const long total = static_cast<long>(rows) * cols;
  const double s = 1.0 / std::sqrt(2.0 * params.alpha);
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                            static_cast<std::uint32_t>(seed >> 32)};
  constexpr double two_pi = 2.0 * M_PI;
  CMat W(rows, cols);
  for (long blk = 0; 2 * blk < total; ++blk) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(blk), static_cast<std::uint32_t>(blk >> 32),
        static_cast<std::uint32_t>(index_in_chunk),
        static_cast<std::uint32_t>(chunk_index)};
    const auto r = philox4x32(ctr, key);
    double u[4];
    for (int i = 0; i < 4; ++i) u[i] = (r[i] + 1.0) * 0x1p-32;  // in (0, 1]
    const double r0 = std::sqrt(-2.0 * std::log(u[0])), t0 = two_pi * u[1];
    const double r1 = std::sqrt(-2.0 * std::log(u[2])), t1 = two_pi * u[3];
    const cplx e0(r0 * std::cos(t0), r0 * std::sin(t0));
    const cplx e1(r1 * std::cos(t1), r1 * std::sin(t1));
    const long f0 = 2 * blk, f1 = 2 * blk + 1;
    W(f0 / cols, f0 % cols) = s * e0;
    if (f1 < total) W(f1 / cols, f1 % cols) = s * e1;
  }
  return W;
}

PartitionResult mc_partition(const EnsembleParams& params, const FlavorSet& flavors,
                             const McConfig& cfg) {
  params.validate();
  require_gaussian(params, "mc_partition");
  validate_flavors_chiral(flavors);
  cfg.validate();

  PartitionResult res;
  res.method = "mc";
  if (flavors.bosonic.empty() && flavors.fermionic.empty()) {
    res.value = cplx(1.0, 0.0);
    res.stderr_est = 0.0;
    return res;
  }

  const int n = params.n, nu = params.nu;
  std::vector<cplx> fsq, bsq;
  cplx pref(1.0, 0.0);
  const cplx mi(0.0, -1.0);
  for (const cplx& k : flavors.fermionic) {
    fsq.push_back(k * k);
    pref *= pow_int(mi * k, nu);
  }
  for (const cplx& k : flavors.bosonic) {
    bsq.push_back(k * k);
    pref /= pow_int(mi * k, nu);
  }

  const std::uint64_t cs = cfg.chunk_size();
  const std::uint64_t nchunks = (cfg.samples + cs - 1) / cs;
  std::vector<cplx> chunk_sum(nchunks, cplx(0.0, 0.0));
  std::vector<std::uint64_t> chunk_len(nchunks, 0);

  Eigen::SelfAdjointEigenSolver<CMat> es;
  for (std::uint64_t c = 0; c < nchunks; ++c) {
    const std::uint64_t len = std::min(cs, cfg.samples - c * cs);
    chunk_len[c] = len;
    cplx acc(0.0, 0.0);
    for (std::uint64_t sdx = 0; sdx < len; ++sdx) {
      const CMat W = sample_matrix(params, cfg.seed, c, sdx);
      const CMat H = W * W.adjoint();
      if (n <= 3)
        es.computeDirect(H, Eigen::EigenvaluesOnly);
      else
        es.compute(H, Eigen::EigenvaluesOnly);
      const auto& y = es.eigenvalues();
      cplx v = pref;
      for (const cplx& q : fsq)
        for (int j = 0; j < n; ++j) v *= y(j) - q;
      for (const cplx& q : bsq)
        for (int j = 0; j < n; ++j) v /= y(j) - q;
      acc += v;
    }
    chunk_sum[c] = acc;
  }

  cplx total(0.0, 0.0);
  for (std::uint64_t c = 0; c < nchunks; ++c) total += chunk_sum[c];  // fixed order
  const cplx mean = total / static_cast<double>(cfg.samples);
  res.value = mean;

  if (nchunks >= 2) {
    std::vector<cplx> ps(nchunks);
    cplx ps_bar(0.0, 0.0);
    for (std::uint64_t c = 0; c < nchunks; ++c) {
      ps[c] = (total - chunk_sum[c]) / static_cast<double>(cfg.samples - chunk_len[c]);
      ps_bar += ps[c];
    }
    ps_bar /= static_cast<double>(nchunks);
    double ss = 0.0;
    for (std::uint64_t c = 0; c < nchunks; ++c) ss += std::norm(ps[c] - ps_bar);
    res.stderr_est =
        std::sqrt((static_cast<double>(nchunks) - 1.0) / static_cast<double>(nchunks) * ss);
    res.warning = res.stderr_est > std::abs(mean);
  }
  return res;
}

// ---------- direct quadrature of the eigenvalue representation -------------------

namespace {

// Nested adaptive integration of g over [0, inf)^dim; tols is indexed from the
// outermost level inward.
cplx nested_semiinf(int level, int dim, std::vector<double>& ys,
                    const std::function<cplx(const std::vector<double>&)>& g,
                    const double* tols) {
  if (level == dim) return g(ys);
  auto r = integrate_semiinf(
      [&](double y) -> cplx {
        ys[level] = y;
        return nested_semiinf(level + 1, dim, ys, g, tols);
      },
      tols[level], 1e-280, 4000);
  return require_converged(r, "eigenvalue-representation quadrature");
}

cplx nested_realline(int level, int dim, std::vector<double>& zs,
                     const std::function<cplx(const std::vector<double>&)>& g,
                     const double* tols) {
  if (level == dim) return g(zs);
  auto r = integrate_real_line(
      [&](double z) -> cplx {
        zs[level] = z;
        return nested_realline(level + 1, dim, zs, g, tols);
      },
      tols[level], 1e-280, 4000);
  return require_converged(r, "generic-measure quadrature");
}

const double* tol_ladder(int dim) {
  static const double t1[] = {1e-12};
  static const double t2[] = {1e-10, 1e-12};
  static const double t3[] = {1e-9, 1e-10, 5e-12};
  switch (dim) {
    case 1: return t1;
    case 2: return t2;
    default: return t3;
  }
}

// Pinned ladder for `dim` nested axes, with the outermost relative tolerance
// optionally replaced by a caller-supplied override (outer_tol > 0).
std::vector<double> ladder_for(int dim, double outer_tol) {
  if (!(outer_tol >= 0.0))
    throw validation_error("quadrature oracle: outer_tol must be >= 0");
  const double* t = tol_ladder(dim);
  std::vector<double> out(t, t + dim);
  if (outer_tol > 0.0) out[0] = outer_tol;
  return out;
}

double vdm_sq(const std::vector<double>& ys) {
  double v = 1.0;
  for (std::size_t a = 0; a < ys.size(); ++a)
    for (std::size_t b = a + 1; b < ys.size(); ++b) v *= (ys[a] - ys[b]) * (ys[a] - ys[b]);
  return v;
}

}  // namespace

PartitionResult quad_partition(const EnsembleParams& params, const FlavorSet& flavors,
                               double outer_tol) {
  params.validate();
  if (params.n > 3)
    throw validation_error("quad_partition: tensor-grid quadrature supports n <= 3 only");
  for (const cplx& k : flavors.bosonic) {
    const cplx u = k * k;
    const double dist = (u.real() >= 0.0) ? std::abs(u.imag()) : std::abs(u);
    if (!(dist > 1e-8 * std::max(1.0, std::abs(u))))
      throw validation_error(
          "quad_partition: bosonic kappa^2 on or near [0, inf): integrand pole");
  }

  PartitionResult res;
  res.method = "quad";
  const int n = params.n, nu = params.nu;
  if (flavors.bosonic.empty() && flavors.fermionic.empty()) {
    res.value = cplx(1.0, 0.0);
    return res;
  }

  std::vector<cplx> fsq, bsq;
  cplx pref(1.0, 0.0);
  const cplx mi(0.0, -1.0);
  for (const cplx& k : flavors.fermionic) {
    fsq.push_back(k * k);
    pref *= pow_int(mi * k, nu);
  }
  for (const cplx& k : flavors.bosonic) {
    bsq.push_back(k * k);
    pref /= pow_int(mi * k, nu);
  }

  auto base = [&](const std::vector<double>& ys) -> double {
    double w = vdm_sq(ys);
    for (double y : ys) w *= weight_y(params, y);
    return w;
  };
  auto with_ratio = [&](const std::vector<double>& ys) -> cplx {
    cplx v(base(ys), 0.0);
    if (v == cplx(0.0, 0.0)) return v;
    for (const cplx& q : fsq)
      for (double y : ys) v *= y - q;
    for (const cplx& q : bsq)
      for (double y : ys) v /= y - q;
    return v;
  };

  std::vector<double> ys(n, 0.0);
  const std::vector<double> tols = ladder_for(n, outer_tol);
  const cplx den = nested_semiinf(
      0, n, ys, [&](const std::vector<double>& y) -> cplx { return {base(y), 0.0}; },
      tols.data());
  const cplx num = nested_semiinf(0, n, ys, with_ratio, tols.data());
  res.value = pref * num / den;
  return res;
}

double quad_kpoint(const EnsembleParams& params, const std::vector<double>& x, int k,
                   double outer_tol) {
  params.validate();
  const int n = params.n;
  if (k != static_cast<int>(x.size()))
    throw validation_error("quad_kpoint: k must equal the number of points");
  if (k < 1 || k > n) throw validation_error("quad_kpoint: need 1 <= k <= n");
  if (n > 3)
    throw validation_error("quad_kpoint: tensor-grid quadrature supports n <= 3 only");
  for (double xa : x)
    if (!(xa > 0.0)) throw validation_error("quad_kpoint: points must be positive");

  // Work in y = lambda^2 variables; transform back at the end:
  // R_k(x) dx_1..dx_k = Ry_k(y) dy_1..dy_k with dy = 2 x dx.
  std::vector<double> yfix;
  for (double xa : x) yfix.push_back(xa * xa);

  auto dens = [&](const std::vector<double>& ys) -> cplx {
    double w = vdm_sq(ys);
    for (double y : ys) w *= weight_y(params, y);
    return {w, 0.0};
  };

  std::vector<double> buf(n, 0.0);
  const std::vector<double> tols = ladder_for(n, outer_tol);
  const double zn = nested_semiinf(0, n, buf, dens, tols.data()).real();

  const int rem = n - k;
  double marg;
  if (rem == 0) {
    marg = dens(yfix).real();
  } else {
    std::vector<double> ybuf(rem, 0.0);
    auto g = [&](const std::vector<double>& tail) -> cplx {
      std::vector<double> all(yfix);
      all.insert(all.end(), tail.begin(), tail.end());
      return dens(all);
    };
    const std::vector<double> mtols = ladder_for(rem, outer_tol);
    marg = nested_semiinf(0, rem, ybuf, g, mtols.data()).real();
  }

  double fact = 1.0;  // n! / (n-k)!
  for (int j = 0; j < k; ++j) fact *= n - j;
  double jac = 1.0;
  for (double xa : x) jac *= 2.0 * xa;
  return fact * marg / zn * jac;
}

PartitionResult quad_generic_partition(const GenericMeasure& measure, int N,
                                       const FlavorSet& flavors, double outer_tol) {
  measure.validate();
  if (N < 1 || N > 3)
    throw validation_error("quad_generic_partition: supports 1 <= N <= 3 only");
  for (const cplx& k : flavors.bosonic)
    if (!(std::abs(k.imag()) > 1e-8 * std::max(1.0, std::abs(k))))
      throw validation_error(
          "quad_generic_partition: bosonic kappa on or near the real axis: integrand "
          "pole");

  PartitionResult res;
  res.method = "quad";
  if (flavors.bosonic.empty() && flavors.fermionic.empty()) {
    res.value = cplx(1.0, 0.0);
    return res;
  }

  auto uweight = [&](double z) -> double {
    double u = 0.0;
    for (auto it = measure.potential.rbegin(); it != measure.potential.rend(); ++it)
      u = (u + *it) * z;
    return (u > 745.0) ? 0.0 : std::exp(-u);
  };
  auto base = [&](const std::vector<double>& zs) -> double {
    double w = vdm_sq(zs);
    for (double z : zs) w *= uweight(z);
    return w;
  };
  auto with_ratio = [&](const std::vector<double>& zs) -> cplx {
    cplx v(base(zs), 0.0);
    if (v == cplx(0.0, 0.0)) return v;
    for (const cplx& q : flavors.fermionic)
      for (double z : zs) v *= z - q;
    for (const cplx& q : flavors.bosonic)
      for (double z : zs) v /= z - q;
    return v;
  };

  std::vector<double> zs(N, 0.0);
  const std::vector<double> tols = ladder_for(N, outer_tol);
  const cplx den = nested_realline(
      0, N, zs, [&](const std::vector<double>& z) -> cplx { return {base(z), 0.0}; },
      tols.data());
  const cplx num = nested_realline(0, N, zs, with_ratio, tols.data());
  res.value = num / den;
  return res;
}

}  // namespace pfrmt

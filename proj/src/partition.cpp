#include "pfrmt/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pfrmt/linalg.hpp"
#include "pfrmt/quadrature.hpp"

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include "json.hpp"
#endif

namespace pfrmt {

namespace {

constexpr double kAxisEps = 1e-8;
constexpr cplx kMinusI{0.0, -1.0};

int floor_div2(int a) { return (a >= 0) ? a / 2 : -((-a + 1) / 2); }

bool off_support(cplx u) {
  const double d = (u.real() >= 0.0) ? std::abs(u.imag()) : std::abs(u);
  return d > kAxisEps * std::max(1.0, std::abs(u));
}

bool off_real_axis(cplx k) {
  return std::abs(k.imag()) > kAxisEps * std::max(1.0, std::abs(k));
}

bool off_negative_axis(cplx k) {
  return k.real() >= 0.0 || std::abs(k.imag()) > kAxisEps * std::max(1.0, std::abs(k));
}

void check_pairwise_distinct(const std::vector<cplx>& xs, const char* who) {
  const double eps = eps_sep_scale(xs);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (std::abs(xs[i] - xs[j]) <= eps)
        throw validation_error(std::string(who) +
                               ": flavor arguments degenerate (separation below eps_sep)");
}

// ---- building-block ratios -------------------------------------------------
// All "tab" arguments are Cauchy-transform tables at the squared bosonic
// argument, tab[j] = phat_j(kappa^2), produced by cauchy_transform_table.

cplx phat_ratio(const OrthogonalSystem& sys, const std::vector<cplx>& tab, int j) {
  if (j == -1) return cplx(-1.0, 0.0);  // fused boundary convention
  return tab[j] / sys.norms[j];
}

cplx z01_block(const OrthogonalSystem& sys, int m, cplx kf) {
  const int nu = sys.params.nu;
  return pow_int(kMinusI * kf, nu) * parity_sign(m) * eval_p(sys, m, kf * kf);
}

cplx z10_block(const OrthogonalSystem& sys, const std::vector<cplx>& tab, int m, cplx kb) {
  const int nu = sys.params.nu;
  return parity_sign(m - 1) * phat_ratio(sys, tab, m - 1) / pow_int(kMinusI * kb, nu);
}

cplx z02_block(const OrthogonalSystem& sys, int m, cplx ka, cplx kb) {
  const int nu = sys.params.nu;
  const cplx a = ka * ka, b = kb * kb;
  return pow_int(-ka * kb, nu) *
         (eval_p(sys, m + 1, a) * eval_p(sys, m, b) -
          eval_p(sys, m, a) * eval_p(sys, m + 1, b)) /
         (a - b);
}

cplx z20_block(const OrthogonalSystem& sys, const std::vector<cplx>& tab_a, cplx ka,
               const std::vector<cplx>& tab_b, cplx kb, int m) {
  const int nu = sys.params.nu;
  const cplx a = ka * ka, b = kb * kb;
  return (phat_ratio(sys, tab_a, m - 2) * tab_b[m - 1] -
          tab_a[m - 1] * phat_ratio(sys, tab_b, m - 2)) /
         (pow_int(-ka * kb, nu) * (a - b) * sys.norms[m - 1]);
}

cplx z11_block(const OrthogonalSystem& sys, const std::vector<cplx>& tab_b, cplx kb,
               cplx kf, int m) {
  const int nu = sys.params.nu;
  const cplx f = kf * kf;
  const cplx t1 = (m >= 1)
                      ? eval_p(sys, m - 1, f) * tab_b[m] / sys.norms[m - 1]
                      : cplx(0.0, 0.0);
  return pow_int(kf / kb, nu) *
         (t1 - phat_ratio(sys, tab_b, m - 1) * eval_p(sys, m, f));
}

// ---- Christoffel-Darboux sums ------------------------------------------------

cplx ff_sum(const OrthogonalSystem& sys, int T, cplx x, cplx y) {
  cplx s(0.0);
  for (int j = 0; j < T; ++j) s += eval_p(sys, j, x) * eval_p(sys, j, y) / sys.norms[j];
  return s;
}

double ff_sum(const OrthogonalSystem& sys, int T, double x, double y) {
  double s = 0.0;
  for (int j = 0; j < T; ++j) s += eval_p(sys, j, x) * eval_p(sys, j, y) / sys.norms[j];
  return s;
}

cplx fb_sum(const OrthogonalSystem& sys, int T, const std::vector<cplx>& tab_u, cplx v) {
  cplx s(0.0);
  for (int j = 0; j < T; ++j) s += eval_p(sys, j, v) * tab_u[j] / sys.norms[j];
  return s;
}

cplx bb_sum(const OrthogonalSystem& sys, int T, const std::vector<cplx>& tab1,
            const std::vector<cplx>& tab2) {
  cplx s(0.0);
  for (int j = 0; j < T; ++j) s += tab1[j] * tab2[j] / sys.norms[j];
  return s;
}

// ratio prod_{j<hi} h_j / prod_{j<lo} h_j with the common prefix cancelled
double norm_ratio(const std::vector<double>& h, int hi, int lo) {
  double r = 1.0;
  if (hi >= lo)
    for (int j = lo; j < hi; ++j) r *= h[j];
  else
    for (int j = hi; j < lo; ++j) r /= h[j];
  return r;
}

std::vector<cplx> squares_of(const std::vector<cplx>& ks, const std::vector<int>& idx) {
  std::vector<cplx> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(ks[i] * ks[i]);
  return out;
}

void check_params_match(const OrthogonalSystem& sys, const EnsembleParams& params,
                        const char* who) {
  const auto& sp = sys.params;
  if (sp.nu != params.nu || sp.alpha != params.alpha || sp.potential != params.potential)
    throw validation_error(std::string(who) +
                           ": orthogonal system was built for different ensemble "
                           "parameters (nu/alpha/potential mismatch)");
}

// group-split determinant assembly; b1/b2 index flavors.bosonic, f1/f2 index
// flavors.fermionic; tabs[i] is the Cauchy table of bosonic flavor i.
cplx det_route(const OrthogonalSystem& sys, int n, const std::vector<cplx>& kB,
               const std::vector<std::vector<cplx>>& tabs, const std::vector<cplx>& kF,
               std::vector<int> b1, std::vector<int> b2, std::vector<int> f1,
               std::vector<int> f2) {
  const int l11 = static_cast<int>(b1.size()), l12 = static_cast<int>(b2.size());
  const int l21 = static_cast<int>(f1.size()), l22 = static_cast<int>(f2.size());
  const int d1 = n + l21 - l11, d2 = n + l22 - l12;
  if (d1 > d2) return det_route(sys, n, kB, tabs, kF, b2, b1, f2, f1);
  if (d1 < 0)
    throw validation_error("partition_det: split yields a negative reduced size "
                           "(unsupported split)");
  const int delta = d2 - d1;
  const long M1 = n + l21, M2 = n + l22;
  const int dim = l22 + l11;  // == l21 + l12 + delta

  CMat M = CMat::Zero(dim, dim);
  for (int s = 0; s < l21; ++s) {
    const cplx ks = kF[f1[s]];
    for (int t = 0; t < l22; ++t) {
      const cplx kt = kF[f2[t]];
      M(s, t) = (d1 >= 1) ? -z02_block(sys, d1 - 1, ks, kt) / sys.norms[d1 - 1]
                          : cplx(0.0, 0.0);
    }
    for (int i = 0; i < l11; ++i) {
      const cplx ki = kB[b1[i]];
      M(s, l22 + i) = -z11_block(sys, tabs[b1[i]], ki, ks, d1) / (ki * ki - ks * ks);
    }
  }
  for (int j = 0; j < l12; ++j) {
    const cplx kj = kB[b2[j]];
    for (int t = 0; t < l22; ++t) {
      const cplx kt = kF[f2[t]];
      M(l21 + j, t) = -z11_block(sys, tabs[b2[j]], kj, kt, d1) / (kj * kj - kt * kt);
    }
    for (int i = 0; i < l11; ++i) {
      const cplx ki = kB[b1[i]];
      M(l21 + j, l22 + i) =
          sys.norms[d1] * z20_block(sys, tabs[b2[j]], kj, tabs[b1[i]], ki, d1 + 1);
    }
  }
  for (int cc = d1 + 1; cc <= d2; ++cc) {
    const int r = l21 + l12 + (cc - d1 - 1);
    for (int t = 0; t < l22; ++t) M(r, t) = z01_block(sys, cc - 1, kF[f2[t]]);
    for (int i = 0; i < l11; ++i)
      M(r, l22 + i) = sys.norms[cc - 1] * z10_block(sys, tabs[b1[i]], cc, kB[b1[i]]);
  }

  const long sig = static_cast<long>(l11) * l21 + static_cast<long>(l12) * l22 +
                   static_cast<long>(l21) * l22 + static_cast<long>(l12) * l21 +
                   static_cast<long>(l11) * l22 + static_cast<long>(l11) * d1 +
                   static_cast<long>(l12) * d2 + choose2(M1) + choose2(M2) +
                   static_cast<long>(delta) * (l12 + l21) +
                   (static_cast<long>(d2) * (d2 - 1) - static_cast<long>(d1) * (d1 - 1)) / 2 +
                   choose2(l11) + choose2(l12) + choose2(l21) + choose2(l22);

  const double hr = norm_ratio(sys.norms, d1, n);
  const cplx bfac = detail::berezinian_rev(squares_of(kB, b1), squares_of(kF, f1)) *
                    detail::berezinian_rev(squares_of(kB, b2), squares_of(kF, f2));
  const cplx detM = (dim > 0) ? determinant(M) : cplx(1.0, 0.0);
  return parity_sign(sig) * hr * detM / bfac;
}

}  // namespace

void validate_flavors_chiral(const FlavorSet& f) {
  std::vector<cplx> allsq;
  allsq.reserve(f.bosonic.size() + f.fermionic.size());
  for (const cplx& k : f.bosonic) allsq.push_back(k * k);
  for (const cplx& k : f.fermionic) allsq.push_back(k * k);
  check_pairwise_distinct(allsq, "flavors (squared arguments)");
  for (const cplx& k : f.bosonic)
    if (!off_support(k * k))
      throw validation_error(
          "flavors: bosonic kappa^2 lies on or near [0, inf); bosonic arguments need a "
          "nonzero imaginary part");
}

void validate_flavors_generic(const FlavorSet& f) {
  std::vector<cplx> all(f.bosonic);
  all.insert(all.end(), f.fermionic.begin(), f.fermionic.end());
  check_pairwise_distinct(all, "flavors");
  for (const cplx& k : f.bosonic)
    if (!off_real_axis(k))
      throw validation_error(
          "flavors: bosonic kappa lies on or near the real axis; the generic-measure "
          "Cauchy transform requires a nonzero imaginary part");
  for (const cplx& k : all)
    if (!off_negative_axis(k))
      throw validation_error(
          "flavors: kappa on the negative real axis; the principal square root "
          "used by the generic route is not defined there (branch cut)");
}

ZBlocks z_building_blocks(const OrthogonalSystem& sys, int m, cplx a, cplx b) {
  if (m < 1 || m > sys.degree - 1)
    throw validation_error("z_building_blocks: need 1 <= m <= degree - 1");
  const double qnan = std::numeric_limits<double>::quiet_NaN();
  const cplx cnan(qnan, qnan);
  ZBlocks out{cnan, cnan, cnan, cnan, cnan};

  out.z01 = z01_block(sys, m, b);

  const cplx ua = a * a, ub = b * b;
  const bool a_bos = off_support(ua);
  const bool b_bos = off_support(ub);
  const bool sep = std::abs(ua - ub) > eps_sep_scale({ua, ub});
  if (sep) out.z02 = z02_block(sys, m, a, b);

  if (a_bos) {
    const auto ta = cauchy_transform_table(sys, ua, m);
    out.z10 = z10_block(sys, ta, m, a);
    out.z11 = z11_block(sys, ta, a, b, m);
    if (b_bos && sep) {
      const auto tb = cauchy_transform_table(sys, ub, m);
      out.z20 = z20_block(sys, ta, a, tb, b, m);
    }
  }
  return out;
}

PartitionResult partition_det(const OrthogonalSystem& sys, const EnsembleParams& params,
                              const FlavorSet& flavors, const DetSplit& split) {
  params.validate();
  check_params_match(sys, params, "partition_det");
  validate_flavors_chiral(flavors);
  const int n = params.n;
  const int k1 = static_cast<int>(flavors.bosonic.size());
  const int k2 = static_cast<int>(flavors.fermionic.size());
  if (split.l11 < 0 || split.l11 > k1 || split.l21 < 0 || split.l21 > k2)
    throw validation_error("partition_det: split counts out of range");
  const int d1 = n + split.l21 - split.l11;
  const int d2 = n + (k2 - split.l21) - (k1 - split.l11);
  if (d1 < 0 || d2 < 0)
    throw validation_error("partition_det: split yields a negative reduced size "
                           "(unsupported split)");
  if (sys.degree < std::max({d1, d2, n}))
    throw validation_error("partition_det: orthogonal system degree too small; build to "
                           "at least max(d1, d2, n)");

  std::vector<std::vector<cplx>> tabs;
  tabs.reserve(k1);
  for (const cplx& k : flavors.bosonic)
    tabs.push_back(cauchy_transform_table(sys, k * k, sys.degree));

  std::vector<int> b1, b2, f1, f2;
  for (int i = 0; i < k1; ++i) (i < split.l11 ? b1 : b2).push_back(i);
  for (int i = 0; i < k2; ++i) (i < split.l21 ? f1 : f2).push_back(i);

  PartitionResult res;
  res.method = "det";
  res.value = det_route(sys, n, flavors.bosonic, tabs, flavors.fermionic, b1, b2, f1, f2);
  return res;
}

PartitionResult partition_pf(const OrthogonalSystem& sys, const EnsembleParams& params,
                             const FlavorSet& flavors) {
  params.validate();
  check_params_match(sys, params, "partition_pf");
  validate_flavors_chiral(flavors);
  const int n = params.n;
  const int k1 = static_cast<int>(flavors.bosonic.size());
  const int k2 = static_cast<int>(flavors.fermionic.size());
  const auto& B = flavors.bosonic;
  const auto& F = flavors.fermionic;
  const int nu = params.nu;

  PartitionResult res;
  res.method = "pfaffian";
  if (k1 == 0 && k2 == 0) {
    res.value = cplx(1.0, 0.0);
    return res;
  }
  if (2 * n + k2 - k1 < 0)
    throw validation_error(
        "partition_pf: 2n + k2 - k1 < 0; too many bosonic flavors for this size");
  const int T = n + floor_div2(k2 - k1);
  if (sys.degree < std::max(T, n))
    throw validation_error("partition_pf: orthogonal system degree too small; build to "
                           "at least max(T, n)");

  std::vector<std::vector<cplx>> tabs;
  tabs.reserve(k1);
  for (const cplx& k : B) tabs.push_back(cauchy_transform_table(sys, k * k, sys.degree));

  const int odd = (k1 + k2) % 2;
  const int o = odd;
  const int dim = odd + k1 + k2;
  CMat K = CMat::Zero(dim, dim);

  auto K_ff = [&](cplx ks, cplx kt) {
    return pow_int(-ks * kt, nu) * (kt - ks) * ff_sum(sys, T, ks * ks, kt * kt);
  };
  auto K_fb = [&](cplx u, const std::vector<cplx>& tab_u, cplx kf) {
    return pow_int(kf / u, nu) *
           ((u + kf) * fb_sum(sys, T, tab_u, kf * kf) + 1.0 / (u - kf));
  };
  auto K_bb = [&](cplx u, const std::vector<cplx>& tu, cplx up,
                  const std::vector<cplx>& tup) {
    return pow_int(-u * up, -static_cast<long>(nu)) *
           ((u - up) * bb_sum(sys, T, tu, tup) + (tup[0] - tu[0]) / (u + up));
  };

  if (odd) {
    for (int a = 0; a < k2; ++a) {
      const cplx v = pow_int(kMinusI * F[a], nu) * eval_p(sys, T, F[a] * F[a]);
      K(0, o + a) = v;
      K(o + a, 0) = -v;
    }
    for (int b = 0; b < k1; ++b) {
      const cplx v = -pow_int(kMinusI * B[b], -static_cast<long>(nu)) * tabs[b][T];
      K(0, o + k2 + b) = v;
      K(o + k2 + b, 0) = -v;
    }
  }
  // ff and bb blocks: both triangles evaluated independently from the kernel
  // formulas, so the antisymmetry assertion below genuinely tests them.
  for (int a = 0; a < k2; ++a)
    for (int b = a + 1; b < k2; ++b) {
      K(o + a, o + b) = K_ff(F[a], F[b]);
      K(o + b, o + a) = K_ff(F[b], F[a]);
    }
  for (int a = 0; a < k2; ++a)
    for (int b = 0; b < k1; ++b) {
      const cplx v = K_fb(B[b], tabs[b], F[a]);
      K(o + a, o + k2 + b) = v;
      K(o + k2 + b, o + a) = -v;
    }
  for (int a = 0; a < k1; ++a)
    for (int b = a + 1; b < k1; ++b) {
      K(o + k2 + a, o + k2 + b) = K_bb(B[a], tabs[a], B[b], tabs[b]);
      K(o + k2 + b, o + k2 + a) = K_bb(B[b], tabs[b], B[a], tabs[a]);
    }

  const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  const double dev = (K + K.transpose()).cwiseAbs().maxCoeff();
  if (dev > 1e-9 * scale)
    throw numerical_error(
        "partition_pf: assembled kernel matrix violates antisymmetry (assembly error)");

  const cplx pfv = pfaffian_checked(K, 1e-9).value;
  const double hr = norm_ratio(sys.norms, T, n);
  const double pref = odd ? parity_sign(n) : 1.0;
  res.value = pref * hr * pfv / detail::berezinian_rev(B, F);
  return res;
}

// ---------- generic measure on the real line ----------------------------------

void GenericMeasure::validate() const {
  if (potential.empty())
    throw validation_error("generic measure: potential must be non-empty");
  if (!(potential.back() > 0.0))
    throw validation_error("generic measure: leading potential coefficient must be positive");
  if (potential.size() % 2 != 0)
    throw validation_error(
        "generic measure: leading degree must be even for a normalizable weight on R");
}

bool GenericMeasure::is_hermite() const {
  return potential.size() == 2 && potential[0] == 0.0 && potential[1] == 1.0;
}

namespace {

double generic_weight(const GenericMeasure& m, double z) {
  double u = 0.0;
  for (auto it = m.potential.rbegin(); it != m.potential.rend(); ++it) u = (u + *it) * z;
  if (u > 745.0) return 0.0;
  return std::exp(-u);
}

double eval_t_rec(const std::vector<double>& a, const std::vector<double>& b, int j,
                  double z) {
  if (j < 0) return 0.0;
  double tm1 = 0.0, tj = 1.0;
  for (int i = 0; i < j; ++i) {
    const double tn = (z - a[i]) * tj - b[i] * tm1;
    tm1 = tj;
    tj = tn;
  }
  return tj;
}

}  // namespace

GenericOrthogonalSystem build_generic_system(const GenericMeasure& m, int J) {
  m.validate();
  if (J < 0 || J > 20)
    throw validation_error("build_generic_system: degree must be in [0, 20]");
  GenericOrthogonalSystem gsys;
  gsys.measure = m;
  gsys.degree = J;
  for (int j = 0; j <= J; ++j) {
    auto tj = [&](double z) { return eval_t_rec(gsys.rec_a, gsys.rec_b, j, z); };
    const double gj =
        require_converged(integrate_real_line([&](double z) -> cplx {
                            const double v = tj(z);
                            return cplx(v * v * generic_weight(m, z), 0.0);
                          }),
                          "generic-system norm integral")
            .real();
    if (!(gj > 0.0) || !std::isfinite(gj))
      throw numerical_error("build_generic_system: norm positivity lost at degree " +
                            std::to_string(j));
    // For symmetric weights this integral vanishes; converge on an absolute
    // scale set by the norm, not on a relative one.
    const double zj =
        require_converged(integrate_real_line(
                              [&](double z) -> cplx {
                                const double v = tj(z);
                                return cplx(z * v * v * generic_weight(m, z), 0.0);
                              },
                              1e-12, 1e-12 * gj, 4000),
                          "generic-system first-moment integral")
            .real();
    gsys.norms.push_back(gj);
    gsys.rec_a.push_back(zj / gj);
    gsys.rec_b.push_back(j == 0 ? 0.0 : gj / gsys.norms[j - 1]);
  }
  return gsys;
}

GenericOrthogonalSystem hermite_closed_form(int J) {
  if (J < 0 || J > 20)
    throw validation_error("hermite_closed_form: degree must be in [0, 20]");
  GenericOrthogonalSystem gsys;
  gsys.measure = GenericMeasure{};
  gsys.degree = J;
  const double sqrt_pi = std::sqrt(M_PI);
  for (int j = 0; j <= J; ++j) {
    gsys.rec_a.push_back(0.0);
    gsys.rec_b.push_back(0.5 * j);
    gsys.norms.push_back(std::tgamma(j + 1.0) * sqrt_pi / pow_int(2.0, j));
  }
  return gsys;
}

namespace {
template <class T>
T eval_t_impl(const GenericOrthogonalSystem& gsys, int j, T z) {
  if (j < -1 || j > gsys.degree)
    throw validation_error("eval_t: degree out of range for this system");
  if (j == -1) return T(0.0);
  T tm1(0.0), tj(1.0);
  for (int i = 0; i < j; ++i) {
    const T tn = (z - gsys.rec_a[i]) * tj - gsys.rec_b[i] * tm1;
    tm1 = tj;
    tj = tn;
  }
  return tj;
}
}  // namespace

double eval_t(const GenericOrthogonalSystem& gsys, int j, double z) {
  return eval_t_impl(gsys, j, z);
}

cplx eval_t(const GenericOrthogonalSystem& gsys, int j, cplx z) {
  return eval_t_impl(gsys, j, z);
}

std::vector<cplx> generic_cauchy_table(const GenericOrthogonalSystem& gsys, cplx u,
                                       int jmax, double eps_axis) {
  if (jmax < 0 || jmax > gsys.degree)
    throw validation_error("generic_cauchy_table: jmax out of range for this system");
  if (!(std::abs(u.imag()) > eps_axis * std::max(1.0, std::abs(u))))
    throw validation_error(
        "generic_cauchy_table: argument lies on or too close to the real axis");
  const auto& m = gsys.measure;
  auto r = integrate_real_line(
      [&](double z) -> cplx { return generic_weight(m, z) / (z - u); }, 1e-12, 1e-15,
      8000);
  std::vector<cplx> tab(jmax + 1);
  tab[0] = require_converged(r, "generic_cauchy_table base quadrature");
  if (jmax >= 1) tab[1] = (u - gsys.rec_a[0]) * tab[0] + gsys.norms[0];
  for (int j = 1; j < jmax; ++j)
    tab[j + 1] = (u - gsys.rec_a[j]) * tab[j] - gsys.rec_b[j] * tab[j - 1];
  return tab;
}

PartitionResult partition_generic_pf(const GenericMeasure& measure, int N,
                                     const FlavorSet& flavors) {
  measure.validate();
  if (N < 1) throw validation_error("partition_generic_pf: N must be >= 1");
  validate_flavors_generic(flavors);
  const int k1 = static_cast<int>(flavors.bosonic.size());
  const int k2 = static_cast<int>(flavors.fermionic.size());
  const auto& B = flavors.bosonic;
  const auto& F = flavors.fermionic;

  PartitionResult res;
  res.method = "generic_pfaffian";
  if (k1 == 0 && k2 == 0) {
    res.value = cplx(1.0, 0.0);
    return res;
  }
  if (2 * N + k2 - k1 < 0)
    throw validation_error(
        "partition_generic_pf: 2N + k2 - k1 < 0; too many bosonic flavors for this size");
  const int T = N + floor_div2(k2 - k1);
  const int J = std::max(T, N);
  const GenericOrthogonalSystem gsys =
      measure.is_hermite() ? hermite_closed_form(J) : build_generic_system(measure, J);

  std::vector<cplx> sB, sF;
  for (const cplx& k : B) sB.push_back(std::sqrt(k));
  for (const cplx& k : F) sF.push_back(std::sqrt(k));

  std::vector<std::vector<cplx>> tB;
  tB.reserve(k1);
  for (const cplx& k : B) tB.push_back(generic_cauchy_table(gsys, k, T));
  std::vector<std::vector<cplx>> tF(k2, std::vector<cplx>(T + 1));
  for (int a = 0; a < k2; ++a)
    for (int j = 0; j <= T; ++j) tF[a][j] = eval_t(gsys, j, F[a]);

  auto sum_ff = [&](int a, int b) {
    cplx s(0.0);
    for (int j = 0; j < T; ++j) s += tF[a][j] * tF[b][j] / gsys.norms[j];
    return s;
  };
  auto sum_fb = [&](int a, int b) {
    cplx s(0.0);
    for (int j = 0; j < T; ++j) s += tF[a][j] * tB[b][j] / gsys.norms[j];
    return s;
  };
  auto sum_bb = [&](int a, int b) {
    cplx s(0.0);
    for (int j = 0; j < T; ++j) s += tB[a][j] * tB[b][j] / gsys.norms[j];
    return s;
  };

  const int odd = (k1 + k2) % 2;
  const int o = odd;
  const int dim = odd + k1 + k2;
  CMat K = CMat::Zero(dim, dim);
  if (odd) {
    for (int a = 0; a < k2; ++a) {
      K(0, o + a) = tF[a][T];
      K(o + a, 0) = -tF[a][T];
    }
    for (int b = 0; b < k1; ++b) {
      K(0, o + k2 + b) = -tB[b][T];
      K(o + k2 + b, 0) = tB[b][T];
    }
  }
  for (int a = 0; a < k2; ++a)
    for (int b = a + 1; b < k2; ++b) {
      K(o + a, o + b) = (sF[b] - sF[a]) * sum_ff(a, b);
      K(o + b, o + a) = (sF[a] - sF[b]) * sum_ff(b, a);
    }
  for (int a = 0; a < k2; ++a)
    for (int b = 0; b < k1; ++b) {
      const cplx v = (sB[b] + sF[a]) * sum_fb(a, b) + 1.0 / (sB[b] - sF[a]);
      K(o + a, o + k2 + b) = v;
      K(o + k2 + b, o + a) = -v;
    }
  for (int a = 0; a < k1; ++a)
    for (int b = a + 1; b < k1; ++b) {
      K(o + k2 + a, o + k2 + b) =
          (sB[a] - sB[b]) * sum_bb(a, b) + (tB[b][0] - tB[a][0]) / (sB[a] + sB[b]);
      K(o + k2 + b, o + k2 + a) =
          (sB[b] - sB[a]) * sum_bb(b, a) + (tB[a][0] - tB[b][0]) / (sB[b] + sB[a]);
    }

  const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  const double dev = (K + K.transpose()).cwiseAbs().maxCoeff();
  if (dev > 1e-9 * scale)
    throw numerical_error(
        "partition_generic_pf: assembled kernel matrix violates antisymmetry");

  const cplx pfv = pfaffian_checked(K, 1e-9).value;
  const double hr = norm_ratio(gsys.norms, T, N);
  const double pref = odd ? parity_sign(N) : 1.0;
  res.value = pref * hr * pfv / detail::berezinian_rev(sB, sF);
  return res;
}

// ---------- k-point correlation functions --------------------------------------

namespace {
void validate_kpoint_args(const EnsembleParams& params, const std::vector<double>& x,
                          int k, const OrthogonalSystem& sys, const char* who) {
  params.validate();
  check_params_match(sys, params, who);
  if (k != static_cast<int>(x.size()))
    throw validation_error(std::string(who) + ": k must equal the number of points");
  if (k < 1 || k > params.n)
    throw validation_error(std::string(who) + ": need 1 <= k <= n");
  if (sys.degree < params.n - 1)
    throw validation_error(std::string(who) + ": orthogonal system degree too small");
  std::vector<cplx> xs;
  for (double xa : x) {
    if (!(xa > 0.0))
      throw validation_error(std::string(who) + ": points must be positive");
    xs.emplace_back(xa, 0.0);
  }
  check_pairwise_distinct(xs, who);
}
}  // namespace

double kpoint_det(const OrthogonalSystem& sys, const EnsembleParams& params,
                  const std::vector<double>& x, int k) {
  validate_kpoint_args(params, x, k, sys, "kpoint_det");
  const int n = params.n;
  Eigen::MatrixXd S(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) S(a, b) = ff_sum(sys, n, x[a] * x[a], x[b] * x[b]);
  double wf = 1.0;
  for (double xa : x) wf *= weight_eval(params, xa);
  return wf * S.determinant();
}

double kpoint_pf(const OrthogonalSystem& sys, const EnsembleParams& params,
                 const std::vector<double>& x, int k) {
  validate_kpoint_args(params, x, k, sys, "kpoint_pf");
  const int n = params.n;
  const int nu = params.nu;
  const double hn1 = sys.norms[n - 1];

  Eigen::MatrixXd Zb(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      Zb(a, b) = pow_int(-x[a] * x[b], static_cast<long>(nu)) * hn1 *
                 ff_sum(sys, n, x[a] * x[a], x[b] * x[b]);

  CMat M = CMat::Zero(2 * k, 2 * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      M(a, b) = (x[a] - x[b]) * Zb(a, b);
      M(a, k + b) = (x[a] + x[b]) * Zb(a, b);
      M(k + a, b) = -(x[a] + x[b]) * Zb(a, b);
      M(k + a, k + b) = -(x[a] - x[b]) * Zb(a, b);
    }

  const cplx pfv = pfaffian_checked(M, 1e-10).value;

  double prod_x = 1.0;
  for (double xa : x) prod_x *= xa;
  const double detZb = Zb.determinant();
  const cplx lhs = pfv * pfv;
  const double rhs = pow_int(2.0, 2L * k) * prod_x * prod_x * detZb * detZb;
  const double denom = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  if (std::abs(lhs - rhs) / denom > 1e-8)
    throw numerical_error(
        "kpoint_pf: Pfaffian-squared identity violated (internal consistency error)");

  double wf = 1.0, prod_pow = 1.0;
  for (double xa : x) {
    wf *= weight_eval(params, xa);
    prod_pow *= pow_int(xa, 2L * nu + 1);
  }
  const double norm = parity_sign(choose2(k) + static_cast<long>(nu) * k) *
                      pow_int(2.0, static_cast<long>(k)) * prod_pow * pow_int(hn1, static_cast<long>(k));
  return (wf * pfv / norm).real();
}

FlavorSet flavors_from_json(const std::string& text) {
  FlavorSet f;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& e : j.value("bosonic", nlohmann::json::array()))
      f.bosonic.emplace_back(e.at("re").get<double>(), e.at("im").get<double>());
    for (const auto& e : j.value("fermionic", nlohmann::json::array()))
      f.fermionic.emplace_back(e.at("re").get<double>(), e.at("im").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("flavors: malformed JSON: ") + e.what());
  }
  return f;
}

std::string flavors_to_json(const FlavorSet& f) {
  nlohmann::json j;
  j["bosonic"] = nlohmann::json::array();
  j["fermionic"] = nlohmann::json::array();
  for (const cplx& k : f.bosonic)
    j["bosonic"].push_back({{"re", k.real()}, {"im", k.imag()}});
  for (const cplx& k : f.fermionic)
    j["fermionic"].push_back({{"re", k.real()}, {"im", k.imag()}});
  return j.dump();
}

}  // namespace pfrmt

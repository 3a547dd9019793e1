#include "pfrmt/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

namespace pfrmt {

namespace {

QuadRule golub_welsch(int n, const std::function<double(int)>& off_diag, double mu0) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = off_diag(k);
    J(k - 1, k) = b;
    J(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int k = 0; k < n; ++k) {
    r.x[k] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    r.w[k] = mu0 * v0 * v0;
  }
  return r;
}

}  // namespace

const QuadRule& gauss_legendre(int n) {
  static std::map<int, QuadRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    auto rule = golub_welsch(
        n, [](int k) { return k / std::sqrt(4.0 * k * k - 1.0); }, 2.0);
    it = cache.emplace(n, std::move(rule)).first;
  }
  return it->second;
}

const QuadRule& gauss_hermite(int n) {
  static std::map<int, QuadRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    auto rule = golub_welsch(
        n, [](int k) { return std::sqrt(0.5 * k); }, std::sqrt(M_PI));
    it = cache.emplace(n, std::move(rule)).first;
  }
  return it->second;
}

namespace {

struct Panel {
  double a, b;
  cplx I;
  double err;
  int depth;
};

struct PanelWorse {
  bool operator()(const Panel& p, const Panel& q) const { return p.err < q.err; }
};

Panel estimate(const std::function<cplx(double)>& f, double a, double b, int depth) {
  const QuadRule& lo = gauss_legendre(15);
  const QuadRule& hi = gauss_legendre(31);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx Ilo{0.0, 0.0}, Ihi{0.0, 0.0};
  for (std::size_t k = 0; k < lo.x.size(); ++k) Ilo += lo.w[k] * f(c + h * lo.x[k]);
  for (std::size_t k = 0; k < hi.x.size(); ++k) Ihi += hi.w[k] * f(c + h * hi.x[k]);
  Ilo *= h;
  Ihi *= h;
  return Panel{a, b, Ihi, std::abs(Ihi - Ilo), depth};
}

}  // namespace

QuadResult integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                              double rel_tol, double abs_floor, int max_panels) {
  constexpr int kMaxDepth = 20;
  std::priority_queue<Panel, std::vector<Panel>, PanelWorse> heap;
  cplx total{0.0, 0.0};
  double toterr = 0.0;
  auto push = [&](const Panel& p) {
    total += p.I;
    toterr += p.err;
    heap.push(p);
  };
  // Seed panels biased toward the left end: mapped semi-infinite integrands
  // concentrate their variation there.
  const double seeds[] = {0.0, 0.25, 0.5, 0.75, 0.9, 1.0};
  for (int s = 0; s + 1 < 6; ++s)
    push(estimate(f, a + (b - a) * seeds[s], a + (b - a) * seeds[s + 1], 0));
  QuadResult out;
  out.panels = 5;
  while (true) {
    const double goal = std::max(abs_floor, rel_tol * std::abs(total));
    if (toterr <= goal) {
      out.converged = true;
      break;
    }
    if (out.panels >= max_panels) break;
    Panel worst = heap.top();
    if (worst.depth >= kMaxDepth) break;
    heap.pop();
    total -= worst.I;
    toterr -= worst.err;
    const double mid = 0.5 * (worst.a + worst.b);
    push(estimate(f, worst.a, mid, worst.depth + 1));
    push(estimate(f, mid, worst.b, worst.depth + 1));
    ++out.panels;
  }
  out.value = total;
  out.abs_err = toterr;
  return out;
}

QuadResult integrate_semiinf(const std::function<cplx(double)>& f, double rel_tol,
                             double abs_floor, int max_panels) {
  auto mapped = [&f](double t) -> cplx {
    const double om = 1.0 - t;
    if (om <= 0.0) return {0.0, 0.0};
    const double y = t / om;
    return f(y) / (om * om);
  };
  return integrate_adaptive(mapped, 0.0, 1.0, rel_tol, abs_floor, max_panels);
}

QuadResult integrate_real_line(const std::function<cplx(double)>& f, double rel_tol,
                               double abs_floor, int max_panels) {
  auto mapped = [&f](double t) -> cplx {
    const double om = 1.0 - t * t;
    if (om <= 0.0) return {0.0, 0.0};
    const double z = t / om;
    return f(z) * (1.0 + t * t) / (om * om);
  };
  return integrate_adaptive(mapped, -1.0, 1.0, rel_tol, abs_floor, max_panels);
}

cplx require_converged(const QuadResult& r, const char* what) {
  if (!r.converged)
    throw numerical_error(std::string("quadrature failed to converge: ") + what);
  return r.value;
}

}  // namespace pfrmt

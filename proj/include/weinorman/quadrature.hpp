#pragma once
// quadrature.hpp: adaptive Gauss-Kronrod integration that splits at known
// discontinuities, plus a grid-cached running integral for cumulative rates.

#include <cmath>
#include <concepts>
#include <limits>
#include <mutex>
#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "weinorman/rates.hpp"

namespace weinorman {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Accept when the error estimate drops below max(abs, rel * |value|).
struct QuadTol {
  double abs = 1e-12;
  double rel = 1e-10;
  QuadTol() = default;
  QuadTol(double t) : abs(t), rel(t) {}
  QuadTol(double a, double r) : abs(a), rel(r) {}
};

namespace detail {

// 7-point Gauss / 15-point Kronrod pair (QUADPACK dqk15 constants).
inline constexpr double kGk15X[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kGk15Wk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kGk15Wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelResult {
  double value = 0;
  double error = 0;
};

template <class F>
PanelResult gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kGk15X[i]);
    fv[14 - i] = f(c + h * kGk15X[i]);
  }
  fv[7] = f(c);
  double resk = 0, resg = 0;
  for (int i = 0; i < 7; ++i) resk += kGk15Wk[i] * (fv[i] + fv[14 - i]);
  resk += kGk15Wk[7] * fv[7];
  for (int i = 1; i < 7; i += 2) resg += kGk15Wg[i / 2] * (fv[i] + fv[14 - i]);
  resg += kGk15Wg[3] * fv[7];
  // QUADPACK-style sharpened error estimate
  double reskh = 0.5 * resk;
  double resasc = kGk15Wk[7] * std::fabs(fv[7] - reskh);
  for (int i = 0; i < 7; ++i)
    resasc += kGk15Wk[i] * (std::fabs(fv[i] - reskh) + std::fabs(fv[14 - i] - reskh));
  resasc *= h;
  double err = std::fabs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (!std::isfinite(resk * h) || !std::isfinite(err))
    err = std::numeric_limits<double>::infinity();
  return {resk * h, err};
}

struct Panel {
  double a, b, value, error;
  int depth;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// Globally adaptive refinement over preset segments. Segments are half-open
// pieces of the domain already split at integrand discontinuities.
template <class F>
double adaptive(F&& f, const std::vector<std::pair<double, double>>& segments, QuadTol tol,
                int max_depth = 50, std::size_t max_panels = 20000) {
  std::vector<Panel> heap;  // max-heap by error, iterable so totals can be rebuilt
  for (auto [a, b] : segments) {
    if (!(b > a)) continue;
    auto r = gk15(f, a, b);
    heap.push_back({a, b, r.value, r.error, 0});
  }
  auto totals = [&heap](double& value, double& error) {
    value = error = 0;
    for (const Panel& p : heap) {
      value += p.value;
      error += p.error;
    }
  };
  std::make_heap(heap.begin(), heap.end());
  double value, error;
  totals(value, error);
  for (std::size_t round = 0; !heap.empty(); ++round) {
    if (std::isfinite(value) && std::isfinite(error) &&
        error <= std::max(tol.abs, tol.rel * std::fabs(value)))
      return value;
    std::pop_heap(heap.begin(), heap.end());
    Panel worst = heap.back();
    double mid = 0.5 * (worst.a + worst.b);
    if (worst.depth >= max_depth || !(mid > worst.a && mid < worst.b) ||
        heap.size() >= max_panels)
      throw QuadratureError("adaptive quadrature failed to converge");
    heap.pop_back();
    auto left = gk15(f, worst.a, mid);
    auto right = gk15(f, mid, worst.b);
    heap.push_back({worst.a, mid, left.value, left.error, worst.depth + 1});
    std::push_heap(heap.begin(), heap.end());
    heap.push_back({mid, worst.b, right.value, right.error, worst.depth + 1});
    std::push_heap(heap.begin(), heap.end());
    // Incremental totals drift (and poison on non-finite panels); rebuild periodically.
    if (round % 32 == 31 || !std::isfinite(worst.value) || !std::isfinite(left.value) ||
        !std::isfinite(right.value)) {
      totals(value, error);
    } else {
      value += left.value + right.value - worst.value;
      error += left.error + right.error - worst.error;
    }
  }
  return 0.0;
}

inline std::vector<std::pair<double, double>> segments_between(
    double a, double b, const std::vector<double>& breakpoints) {
  std::vector<std::pair<double, double>> segs;
  double lo = a;
  for (double bp : breakpoints) {
    if (bp <= lo || bp >= b) continue;
    segs.emplace_back(lo, bp);
    lo = bp;
  }
  segs.emplace_back(lo, b);
  return segs;
}

// Vector-valued counterpart of gk15: one sweep over the 15 nodes evaluates
// every component, so a family of integrands sharing expensive per-node work
// pays for it once.
struct FamilyPanel {
  double a, b;
  std::vector<double> value, error;
  double badness;  // max component error, the refinement priority
  int depth;
  bool operator<(const FamilyPanel& o) const { return badness < o.badness; }
};

template <class F>
FamilyPanel gk15_family(F&& f, double a, double b, int count) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::vector<double> fv(15 * static_cast<std::size_t>(count));
  for (int i = 0; i < 7; ++i) {
    f(c - h * kGk15X[i], &fv[static_cast<std::size_t>(i) * count]);
    f(c + h * kGk15X[i], &fv[static_cast<std::size_t>(14 - i) * count]);
  }
  f(c, &fv[7 * static_cast<std::size_t>(count)]);

  FamilyPanel panel{a, b, std::vector<double>(count), std::vector<double>(count), 0.0, 0};
  auto at = [&](int node, int k) { return fv[static_cast<std::size_t>(node) * count + k]; };
  for (int k = 0; k < count; ++k) {
    double resk = 0, resg = 0;
    for (int i = 0; i < 7; ++i) resk += kGk15Wk[i] * (at(i, k) + at(14 - i, k));
    resk += kGk15Wk[7] * at(7, k);
    for (int i = 1; i < 7; i += 2) resg += kGk15Wg[i / 2] * (at(i, k) + at(14 - i, k));
    resg += kGk15Wg[3] * at(7, k);
    double reskh = 0.5 * resk;
    double resasc = kGk15Wk[7] * std::fabs(at(7, k) - reskh);
    for (int i = 0; i < 7; ++i)
      resasc += kGk15Wk[i] * (std::fabs(at(i, k) - reskh) + std::fabs(at(14 - i, k) - reskh));
    resasc *= h;
    double err = std::fabs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0)
      err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (!std::isfinite(resk * h) || !std::isfinite(err))
      err = std::numeric_limits<double>::infinity();
    panel.value[k] = resk * h;
    panel.error[k] = err;
    panel.badness = std::max(panel.badness, err);
  }
  return panel;
}

template <class F>
std::vector<double> adaptive_family(F&& f, const std::vector<std::pair<double, double>>& segments,
                                    int count, QuadTol tol, int max_depth = 50,
                                    std::size_t max_panels = 20000) {
  std::vector<FamilyPanel> heap;
  for (auto [a, b] : segments) {
    if (!(b > a)) continue;
    heap.push_back(gk15_family(f, a, b, count));
  }
  std::make_heap(heap.begin(), heap.end());
  std::vector<double> value(count), error(count);
  while (!heap.empty()) {
    std::fill(value.begin(), value.end(), 0.0);
    std::fill(error.begin(), error.end(), 0.0);
    for (const FamilyPanel& p : heap)
      for (int k = 0; k < count; ++k) {
        value[k] += p.value[k];
        error[k] += p.error[k];
      }
    bool ok = true;
    for (int k = 0; k < count && ok; ++k)
      ok = std::isfinite(value[k]) && error[k] <= std::max(tol.abs, tol.rel * std::fabs(value[k]));
    if (ok) return value;
    std::pop_heap(heap.begin(), heap.end());
    FamilyPanel worst = std::move(heap.back());
    heap.pop_back();
    double mid = 0.5 * (worst.a + worst.b);
    if (worst.depth >= max_depth || !(mid > worst.a && mid < worst.b) ||
        heap.size() >= max_panels)
      throw QuadratureError("adaptive family quadrature failed to converge");
    FamilyPanel left = gk15_family(f, worst.a, mid, count);
    FamilyPanel right = gk15_family(f, mid, worst.b, count);
    left.depth = right.depth = worst.depth + 1;
    heap.push_back(std::move(left));
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(std::move(right));
    std::push_heap(heap.begin(), heap.end());
  }
  return std::vector<double>(count, 0.0);
}

}  // namespace detail

// Integral of f over [a, b]; breakpoints inside (a, b) become hard panel edges.
// RateFunction arguments go through the overload below so their own breakpoints apply.
template <class F>
  requires std::invocable<F&, double> &&
           (!std::same_as<std::remove_cvref_t<F>, RateFunction>)
double integrate(F&& f, double a, double b, const std::vector<double>& breakpoints = {},
                 QuadTol tol = {}) {
  if (!(b >= a)) throw std::invalid_argument("integrate: requires b >= a");
  if (a == b) return 0.0;
  return detail::adaptive(f, detail::segments_between(a, b, breakpoints), tol);
}

inline double integrate(const RateFunction& f, double a, double b, QuadTol tol = {}) {
  return integrate([&f](double t) { return f(t); }, a, b, f.breakpoints(a, b), tol);
}

// Integral of a(u) * weight(u, t) over u in [0, t], recomputed per call because the
// weight depends on the upper limit. Pieces where a vanishes identically are skipped.
template <class W>
double weighted_integral(const RateFunction& a, W&& weight, double t, QuadTol tol = {}) {
  if (!(t >= 0)) throw std::invalid_argument("weighted_integral: requires t >= 0");
  if (t == 0) return 0.0;
  std::vector<std::pair<double, double>> segs;
  for (auto [lo, hi] : detail::segments_between(0.0, t, a.breakpoints(0.0, t)))
    if (!a.is_zero_on(lo, hi)) segs.emplace_back(lo, hi);
  if (segs.empty()) return 0.0;
  auto f = [&](double u) { return a(u) * weight(u, t); };
  return detail::adaptive(f, segs, tol);
}

// Integrals of a(u) * w_k(u) over u in [0, t] for a whole family of weights at
// once: fill(u, out) writes w_0(u) .. w_{count-1}(u). Node positions, the rate
// evaluation, and any work shared inside fill are paid once per node instead
// of once per component. Convergence is per component.
template <class F>
std::vector<double> weighted_integral_family(const RateFunction& a, int count, F&& fill, double t,
                                             QuadTol tol = {}) {
  if (!(t >= 0)) throw std::invalid_argument("weighted_integral_family: requires t >= 0");
  if (count < 0) throw std::invalid_argument("weighted_integral_family: negative family size");
  if (count == 0) return {};
  std::vector<std::pair<double, double>> segs;
  if (t > 0)
    for (auto [lo, hi] : detail::segments_between(0.0, t, a.breakpoints(0.0, t)))
      if (!a.is_zero_on(lo, hi)) segs.emplace_back(lo, hi);
  if (segs.empty()) return std::vector<double>(count, 0.0);
  std::vector<double> w(count);
  auto f = [&](double u, double* out) {
    double au = a(u);
    fill(u, w.data());
    for (int k = 0; k < count; ++k) out[k] = au * w[k];
  };
  return detail::adaptive_family(f, segs, count, tol);
}

// Running integral of a rate over [0, t] with a monotone cached grid: a query
// integrates only the gap past the nearest cached point at or below t, then the
// result joins the grid. Queries are internally locked so shared model objects
// can be read concurrently.
class CumulativeIntegral {
 public:
  CumulativeIntegral() : CumulativeIntegral(RateFunction::constant(0.0)) {}
  explicit CumulativeIntegral(RateFunction f, QuadTol tol = {})
      : f_(std::move(f)), tol_(tol), grid_{{0.0, 0.0}} {}

  CumulativeIntegral(const CumulativeIntegral& o) { *this = o; }
  CumulativeIntegral& operator=(const CumulativeIntegral& o) {
    if (this != &o) {
      std::scoped_lock lock(o.mu_);
      f_ = o.f_;
      tol_ = o.tol_;
      grid_ = o.grid_;
    }
    return *this;
  }

  const RateFunction& rate() const { return f_; }

  double operator()(double t) const {
    if (!(t >= 0)) throw std::invalid_argument("CumulativeIntegral: requires t >= 0");
    std::scoped_lock lock(mu_);
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t,
                               [](double x, const auto& p) { return x < p.first; });
    auto at = it - 1;  // grid_ holds (0,0), so at is valid
    if (at->first == t) return at->second;
    double value = at->second +
                   integrate([this](double u) { return f_(u); }, at->first, t,
                             f_.breakpoints(at->first, t), tol_);
    grid_.insert(it, {t, value});
    return value;
  }

 private:
  RateFunction f_;
  QuadTol tol_;
  mutable std::vector<std::pair<double, double>> grid_;
  mutable std::mutex mu_;
};

}  // namespace weinorman

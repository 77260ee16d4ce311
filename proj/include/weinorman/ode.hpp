#pragma once
// ode.hpp: direct integration of dp/dt = H(t) p. The adaptive Dormand-Prince
// 4(5) pair is the accuracy baseline; fixed-step explicit Euler is the
// deliberately naive opponent whose step count grows linearly with t.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "weinorman/probability.hpp"
#include "weinorman/sparse.hpp"

namespace weinorman {

struct OdeStats {
  long rhs_evals = 0;
  long steps_accepted = 0;
  long steps_rejected = 0;
};

namespace detail {

// Scaled RMS norm of the increment against a componentwise tolerance built
// from the current and proposed states.
inline double error_norm(const std::vector<double>& err, const std::vector<double>& y,
                         const std::vector<double>& ynew, double rtol, double atol) {
  double s = 0;
  for (std::size_t i = 0; i < err.size(); ++i) {
    double scale = atol + rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
    double q = err[i] / scale;
    s += q * q;
  }
  return std::sqrt(s / static_cast<double>(err.size()));
}

}  // namespace detail

inline ProbabilityVector rk45_solve(const TimeDependentGenerator& h, const ProbabilityVector& p0,
                                    double t_end, double rtol = 1e-8, double atol = 1e-10,
                                    OdeStats* stats = nullptr) {
  if (t_end < 0) throw std::invalid_argument("rk45_solve: negative end time");
  if (rtol <= 0 || atol <= 0) throw std::invalid_argument("rk45_solve: tolerances must be positive");
  if (p0.dim() != h.dim) throw std::invalid_argument("rk45_solve: dimension mismatch");
  if (t_end == 0) return p0;

  const int n = h.dim;
  // Dormand-Prince coefficients; the last stage doubles as the first of the
  // next step (first-same-as-last).
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

  std::vector<double> y = p0.values;
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), yerr(n);

  auto rhs = [&](double t, const std::vector<double>& state, std::vector<double>& out) {
    h.apply(t, state.data(), out.data());
    if (stats) ++stats->rhs_evals;
  };

  double t = 0;
  rhs(t, y, k1);

  // Initial step size: compare the state scale against the derivative scale,
  // then refine with one explicit probe.
  double dt;
  {
    double d0 = detail::error_norm(y, y, y, rtol, atol);
    double d1 = detail::error_norm(k1, y, y, rtol, atol);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_end);
    for (int i = 0; i < n; ++i) ytmp[i] = y[i] + h0 * k1[i];
    rhs(h0, ytmp, k2);
    for (int i = 0; i < n; ++i) yerr[i] = k2[i] - k1[i];
    double d2 = detail::error_norm(yerr, y, y, rtol, atol) / h0;
    double h1 = (std::max(d1, d2) <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                            : std::pow(0.01 / std::max(d1, d2), 0.2);
    dt = std::min({100 * h0, h1, t_end});
  }

  bool just_rejected = false;
  while (t < t_end) {
    if (dt < 1e-14 * std::max(1.0, std::fabs(t)))
      throw std::runtime_error("rk45_solve: step size underflow");
    bool last = dt >= t_end - t;
    if (last) dt = t_end - t;

    for (int i = 0; i < n; ++i) ytmp[i] = y[i] + dt * a21 * k1[i];
    rhs(t + c2 * dt, ytmp, k2);
    for (int i = 0; i < n; ++i) ytmp[i] = y[i] + dt * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * dt, ytmp, k3);
    for (int i = 0; i < n; ++i) ytmp[i] = y[i] + dt * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * dt, ytmp, k4);
    for (int i = 0; i < n; ++i)
      ytmp[i] = y[i] + dt * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * dt, ytmp, k5);
    for (int i = 0; i < n; ++i)
      ytmp[i] = y[i] + dt * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(t + dt, ytmp, k6);
    for (int i = 0; i < n; ++i)
      ynew[i] = y[i] + dt * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(t + dt, ynew, k7);
    for (int i = 0; i < n; ++i)
      yerr[i] = dt * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

    double err = detail::error_norm(yerr, y, ynew, rtol, atol);
    if (err <= 1.0) {
      t = last ? t_end : t + dt;
      y.swap(ynew);
      k1.swap(k7);
      if (stats) ++stats->steps_accepted;
      double grow = just_rejected ? 1.0 : 10.0;
      dt *= std::min(grow, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-16), -0.2)));
      just_rejected = false;
    } else {
      if (stats) ++stats->steps_rejected;
      dt *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      just_rejected = true;
    }
  }

  ProbabilityVector out;
  out.values = std::move(y);
  out.overflow_index = p0.overflow_index;
  return out;
}

inline ProbabilityVector euler_solve(const TimeDependentGenerator& h, const ProbabilityVector& p0,
                                     double t_end, double dt, OdeStats* stats = nullptr) {
  if (t_end < 0) throw std::invalid_argument("euler_solve: negative end time");
  if (dt <= 0) throw std::invalid_argument("euler_solve: step must be positive");
  if (p0.dim() != h.dim) throw std::invalid_argument("euler_solve: dimension mismatch");

  const int n = h.dim;
  std::vector<double> y = p0.values;
  std::vector<double> f(n);
  // t is recomputed as i*dt each step so that rate discontinuities aligned
  // with the grid are hit without accumulation drift.
  long i = 0;
  for (;; ++i) {
    double t = static_cast<double>(i) * dt;
    double step = std::min(dt, t_end - t);
    if (step <= 0) break;
    h.apply(t, y.data(), f.data());
    if (stats) {
      ++stats->rhs_evals;
      ++stats->steps_accepted;
    }
    for (int r = 0; r < n; ++r) y[r] += step * f[r];
    if (step < dt) break;
  }

  ProbabilityVector out;
  out.values = std::move(y);
  out.overflow_index = p0.overflow_index;
  return out;
}

}  // namespace weinorman

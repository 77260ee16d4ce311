#pragma once
// probability.hpp: distribution vectors over a truncated state space. When a
// truncation lumps all escaped mass into one state, overflow_index marks it so
// reports can separate real probabilities from the absorber.

#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace weinorman {

struct ProbabilityVector {
  std::vector<double> values;
  std::optional<int> overflow_index;

  int dim() const { return static_cast<int>(values.size()); }

  double sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }

  double overflow_mass() const {
    return overflow_index ? values[static_cast<std::size_t>(*overflow_index)] : 0.0;
  }

  bool is_valid(double tol_neg = 1e-12, double tol_sum = 1e-9) const {
    for (double v : values) {
      if (!std::isfinite(v) || v < -tol_neg) return false;
    }
    return std::fabs(sum() - 1.0) <= tol_sum;
  }

  void validate(double tol_neg = 1e-12, double tol_sum = 1e-9) const {
    for (double v : values) {
      if (!std::isfinite(v)) throw std::domain_error("probability vector has non-finite entry");
      if (v < -tol_neg)
        throw std::domain_error("probability vector entry below -" + std::to_string(tol_neg));
    }
    double s = sum();
    if (std::fabs(s - 1.0) > tol_sum)
      throw std::domain_error("probability vector sums to " + std::to_string(s));
  }

  static ProbabilityVector point_mass(int dim, int state,
                                      std::optional<int> overflow = std::nullopt) {
    if (state < 0 || state >= dim) throw std::invalid_argument("point_mass: state out of range");
    ProbabilityVector p;
    p.values.assign(dim, 0.0);
    p.values[static_cast<std::size_t>(state)] = 1.0;
    p.overflow_index = overflow;
    return p;
  }
};

inline double linf_diff(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("linf_diff: size mismatch");
  double best = 0;
  for (std::size_t i = 0; i < x.size(); ++i) best = std::max(best, std::fabs(x[i] - y[i]));
  return best;
}

}  // namespace weinorman

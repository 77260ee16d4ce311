#pragma once
// birth_death.hpp: immigration-death process with time-dependent rates.
// Births arrive at rate b(t) regardless of population; each individual dies
// at per-capita rate d(t). The generator decomposes over the ladder algebra
//   H(t) = b(t)(R - 1) + d(t)(L - M),
// and the solution from an empty initial state is Poisson with a mean set by
// two one-dimensional integrals.
//
// States 0 .. n_max-1, where the last state lumps together every count at or
// above n_max-1: R carries a self-loop there so all columns of H sum to zero,
// and the lumped Poisson tail lands on that state exactly.

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "weinorman/factorization.hpp"
#include "weinorman/lie.hpp"
#include "weinorman/probability.hpp"
#include "weinorman/quadrature.hpp"
#include "weinorman/rates.hpp"
#include "weinorman/sparse.hpp"

namespace weinorman {

struct BirthDeathCoefficients {
  std::function<double(double)> g1, g2, g3, g4;
};

class BirthDeathModel {
 public:
  static BirthDeathModel build(RateFunction b, RateFunction d, int n_max,
                               QuadTol tol = {}) {
    if (n_max < 2) throw std::invalid_argument("birth-death: n_max must be at least 2");
    BirthDeathModel m(std::move(b), std::move(d), n_max, tol);
    return m;
  }

  int dim() const { return n_max_; }
  int overflow_index() const { return n_max_ - 1; }
  const RateFunction& birth_rate() const { return b_; }
  const RateFunction& death_rate() const { return d_; }
  const LieBasis& basis() const { return basis_; }
  const SparseGenerator& op_r() const { return basis_.elements[1]; }
  const SparseGenerator& op_l() const { return basis_.elements[2]; }
  const SparseGenerator& op_m() const { return basis_.elements[3]; }

  TimeDependentGenerator generator() const {
    TimeDependentGenerator g;
    g.dim = n_max_;
    RateFunction b = b_, d = d_;
    g.parts.emplace_back([b](double t) { return b(t); }, birth_part_);
    g.parts.emplace_back([d](double t) { return d(t); }, death_part_);
    return g;
  }

  // g4 = -D, g3 = e^D - 1, g2 = e^{-D(t)} int_0^t b e^D, g1 = -g2, with
  // D(t) = int_0^t d. The e^{-D} prefactor on g2 is forced by consistency
  // with the generating function: only this sign reproduces p_n(t) =
  // e^{-g2} g2^n / n! and survives the derivative check against H(t)p.
  BirthDeathCoefficients coefficients() const {
    auto dd = D_;
    auto b = b_;
    QuadTol tol = tol_;
    auto g2 = [dd, b, tol](double t) {
      double dt = (*dd)(t);
      // Weight folded as exp(D(u) - D(t)) so the integrand never overflows
      // even when D grows large over long horizons.
      double integral = weighted_integral(
          b, [dd, dt](double u, double) { return std::exp((*dd)(u) - dt); }, t, tol);
      return integral;
    };
    BirthDeathCoefficients c;
    c.g2 = g2;
    c.g1 = [g2](double t) { return -g2(t); };
    c.g3 = [dd](double t) { return std::exp((*dd)(t)) - 1.0; };
    c.g4 = [dd](double t) { return -(*dd)(t); };
    return c;
  }

  WeiNormanFactorization factorization() const {
    BirthDeathCoefficients c = coefficients();
    WeiNormanFactorization u;
    u.dim = n_max_;
    WeiNormanFactor f1{"g1*1", c.g1, SparseGenerator::identity(n_max_), true};
    WeiNormanFactor f2{"g2*R", c.g2, op_r(), false};
    WeiNormanFactor f3{"g3*L", c.g3, op_l(), false};
    WeiNormanFactor f4{"g4*M", c.g4, op_m(), false};
    u.factors = {f1, f2, f3, f4};
    return u;
  }

  ProbabilityVector initial_delta0() const {
    return ProbabilityVector::point_mass(n_max_, 0, overflow_index());
  }

  // Closed form for N(0) = 0: Poisson with mean g2(t), tail lumped into the
  // overflow state.
  ProbabilityVector poisson_solution(double t) const {
    if (t < 0) throw std::invalid_argument("poisson_solution: negative time");
    double mean = coefficients().g2(t);
    ProbabilityVector p;
    p.values.assign(n_max_, 0.0);
    p.overflow_index = overflow_index();
    double term = std::exp(-mean);
    double cum = 0;
    for (int n = 0; n + 1 < n_max_; ++n) {
      p.values[n] = term;
      cum += term;
      term *= mean / (n + 1);
    }
    p.values[n_max_ - 1] = std::max(0.0, 1.0 - cum);
    return p;
  }

  // G(s,t) = exp[(s-1) g2(t)] for N(0) = 0.
  double pgf(double s, double t) const {
    if (std::fabs(s) > 1.0) throw std::invalid_argument("pgf: |s| must be at most 1");
    return std::exp((s - 1.0) * coefficients().g2(t));
  }

  // Exact bracket table on the interior block: [L,R] = 1, [M,R] = R,
  // [L,M] = L, and the identity commutes with everything.
  VerifyReport verify_brackets() const {
    VerifyReport report;
    auto expect = [&](int i, int j, std::vector<std::pair<int, double>> want,
                      const std::string& name) {
      ++report.checks;
      if (basis_.bracket(i, j) != want) report.failures.push_back(name);
    };
    expect(2, 1, {{0, 1.0}}, "[L,R] = 1");
    expect(3, 1, {{1, 1.0}}, "[M,R] = R");
    expect(2, 3, {{2, 1.0}}, "[L,M] = L");
    for (int j = 1; j < 4; ++j)
      expect(0, j, {}, "[1," + basis_.labels[j] + "] = 0");
    return report;
  }

 private:
  BirthDeathModel(RateFunction b, RateFunction d, int n_max, QuadTol tol)
      : b_(std::move(b)),
        d_(std::move(d)),
        n_max_(n_max),
        tol_(tol),
        D_(std::make_shared<CumulativeIntegral>(d_, tol)) {
    std::vector<Entry> r, l, m;
    for (int n = 1; n < n_max; ++n) {
      r.push_back({n, n - 1, 1.0});
      l.push_back({n - 1, n, double(n)});
      m.push_back({n, n, double(n)});
    }
    r.push_back({n_max - 1, n_max - 1, 1.0});  // overflow self-loop keeps R stochastic
    auto op_r = SparseGenerator::from_entries(n_max, std::move(r));
    auto op_l = SparseGenerator::from_entries(n_max, std::move(l));
    auto op_m = SparseGenerator::from_entries(n_max, std::move(m));
    auto op_i = SparseGenerator::identity(n_max);

    // Margin 4 keeps every bracket artifact of the lumped corner outside the
    // checked block; truncations too small for that fall back to the full
    // block and report distorted constants rather than failing to build.
    int interior = std::max(2, n_max - 4);
    interior = std::min(interior, n_max);
    basis_ = structure_constants({"1", "R", "L", "M"}, {op_i, op_r, op_l, op_m}, interior, 0.0);

    birth_part_ = linear_combination({{1.0, &basis_.elements[1]}, {-1.0, &basis_.elements[0]}});
    death_part_ = linear_combination({{1.0, &basis_.elements[2]}, {-1.0, &basis_.elements[3]}});
  }

  RateFunction b_, d_;
  int n_max_;
  QuadTol tol_;
  std::shared_ptr<CumulativeIntegral> D_;
  LieBasis basis_;
  SparseGenerator birth_part_, death_part_;
};

}  // namespace weinorman

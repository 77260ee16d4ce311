#pragma once
// sir_cohort.hpp: a closed cohort of N individuals, each moving independently
// through susceptible -> infected -> recovered with time-dependent hazards
// lambda(t) (infection) and gamma(t) (recovery). The joint count process
// (S, I) is a CTMC on the triangle S + I <= N whose generator
//   H(t) = lambda(t)(tau - S_op) + gamma(t)(rho - I_op)
// lives in a five-dimensional solvable Lie algebra, so the propagator is an
// exact five-factor product of exponentials. Independence also gives a
// multinomial closed form over (S, I, R), used here as an oracle.

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "weinorman/factorization.hpp"
#include "weinorman/lie.hpp"
#include "weinorman/ode.hpp"
#include "weinorman/probability.hpp"
#include "weinorman/quadrature.hpp"
#include "weinorman/rates.hpp"
#include "weinorman/sparse.hpp"

namespace weinorman {

// Triangular enumeration of (S, I) with S + I <= N, ordered by decreasing S
// and increasing I within each level: (N,0), (N-1,0), (N-1,1), (N-2,0), ...
struct CohortStateSpace {
  int N = 0;

  int dim() const { return (N + 1) * (N + 2) / 2; }

  int index(int s, int i) const {
    if (s < 0 || i < 0 || s + i > N)
      throw std::out_of_range("CohortStateSpace: state outside triangle");
    int d = N - s;
    return d * (d + 1) / 2 + i;
  }

  std::pair<int, int> state(int idx) const {
    if (idx < 0 || idx >= dim()) throw std::out_of_range("CohortStateSpace: index out of range");
    int d = 0;
    while ((d + 1) * (d + 2) / 2 <= idx) ++d;
    int i = idx - d * (d + 1) / 2;
    return {N - d, i};
  }

  std::string label(int idx) const {
    auto [s, i] = state(idx);
    return std::to_string(s) + ":" + std::to_string(i);
  }
};

// Coefficients of U(t) = e^{g1 D} e^{g2 tau} e^{g3 S} e^{g4 rho} e^{g5 I},
// factors listed left to right (the rightmost hits the state vector first).
struct CohortCoefficients {
  std::function<double(double)> g1, g2, g3, g4, g5;
};

class SirCohortModel {
 public:
  // Basis indices into basis().elements.
  enum : int { kS = 0, kI = 1, kDelta = 2, kRho = 3, kTau = 4 };

  static SirCohortModel build(RateFunction lambda, RateFunction gamma, int cohort_size,
                              QuadTol tol = {}) {
    if (cohort_size < 1) throw std::invalid_argument("sir-cohort: cohort size must be positive");
    return SirCohortModel(std::move(lambda), std::move(gamma), cohort_size, tol);
  }

  const CohortStateSpace& space() const { return space_; }
  int dim() const { return space_.dim(); }
  int cohort_size() const { return space_.N; }
  const RateFunction& infection_rate() const { return lambda_; }
  const RateFunction& recovery_rate() const { return gamma_; }
  const LieBasis& basis() const { return basis_; }

  TimeDependentGenerator generator() const {
    TimeDependentGenerator g;
    g.dim = dim();
    RateFunction lam = lambda_, gam = gamma_;
    g.parts.emplace_back([lam](double t) { return lam(t); }, infection_part_);
    g.parts.emplace_back([gam](double t) { return gam(t); }, recovery_part_);
    return g;
  }

  // Single-individual occupation probabilities (pi1, pi2, pi3) for the
  // susceptible, infected, and recovered phases:
  //   pi1 = e^{-Lambda(t)}
  //   pi2 = int_0^t lambda(u) e^{-Lambda(u)} e^{Gamma(u) - Gamma(t)} du
  //   pi3 = 1 - pi1 - pi2
  std::array<double, 3> marginals(double t) const {
    if (t < 0) throw std::invalid_argument("marginals: negative time");
    double pi1 = std::exp(-(*Lam_)(t));
    double pi2 = pi2_integral(t);
    double pi3 = std::min(1.0, std::max(0.0, 1.0 - pi1 - pi2));
    return {pi1, pi2, pi3};
  }

  // Same marginals obtained by integrating pi1' = -lambda pi1,
  // pi2' = lambda pi1 - gamma pi2 numerically; cross-check for the
  // quadrature-based closed form.
  std::array<double, 2> marginals_ode(double t, double rtol = 1e-10, double atol = 1e-12) const {
    TimeDependentGenerator h;
    h.dim = 2;
    RateFunction lam = lambda_, gam = gamma_;
    h.parts.emplace_back([lam](double u) { return lam(u); },
                         SparseGenerator::from_entries(2, {{0, 0, -1.0}, {1, 0, 1.0}}));
    h.parts.emplace_back([gam](double u) { return gam(u); },
                         SparseGenerator::from_entries(2, {{1, 1, -1.0}}));
    ProbabilityVector p0;
    p0.values = {1.0, 0.0};
    ProbabilityVector p = rk45_solve(h, p0, t, rtol, atol);
    return {p.values[0], p.values[1]};
  }

  CohortCoefficients coefficients() const {
    auto self = *this;  // cheap: shared integral caches, small operators
    CohortCoefficients c;
    c.g3 = [self](double t) { return -(*self.Lam_)(t); };
    c.g5 = [self](double t) { return -(*self.Gam_)(t); };
    c.g4 = [self](double t) { return std::expm1((*self.Gam_)(t)); };
    c.g2 = [self](double t) { return std::exp((*self.Lam_)(t)) * self.pi2_integral(t); };
    c.g1 = [self](double t) {
      double el = (*self.Lam_)(t);
      return std::expm1(el) - std::exp(el) * self.pi2_integral(t);
    };
    return c;
  }

  WeiNormanFactorization factorization() const {
    CohortCoefficients c = coefficients();
    WeiNormanFactorization u;
    u.dim = dim();
    u.factors = {
        WeiNormanFactor{"g1*Delta", c.g1, basis_.elements[kDelta], false},
        WeiNormanFactor{"g2*tau", c.g2, basis_.elements[kTau], false},
        WeiNormanFactor{"g3*S", c.g3, basis_.elements[kS], false},
        WeiNormanFactor{"g4*rho", c.g4, basis_.elements[kRho], false},
        WeiNormanFactor{"g5*I", c.g5, basis_.elements[kI], false},
    };
    return u;
  }

  ProbabilityVector initial_all_susceptible() const {
    return ProbabilityVector::point_mass(dim(), space_.index(space_.N, 0));
  }

  // Multinomial closed form for the all-susceptible start:
  //   p(S,I) = N! / (S! I! R!) pi1^S pi2^I pi3^R,  R = N - S - I.
  ProbabilityVector multinomial_solution(double t) const {
    auto [pi1, pi2, pi3] = marginals(t);
    int n = space_.N;
    ProbabilityVector p;
    p.values.assign(dim(), 0.0);
    for (int s = 0; s <= n; ++s)
      for (int i = 0; s + i <= n; ++i) {
        int r = n - s - i;
        double lt = std::lgamma(n + 1.0) - std::lgamma(s + 1.0) - std::lgamma(i + 1.0) -
                    std::lgamma(r + 1.0);
        bool zero = false;
        auto fold = [&](int count, double pi) {
          if (count == 0) return;
          if (pi <= 0.0)
            zero = true;
          else
            lt += count * std::log(pi);
        };
        fold(s, pi1);
        fold(i, pi2);
        fold(r, pi3);
        p.values[space_.index(s, i)] = zero ? 0.0 : std::exp(lt);
      }
    return p;
  }

  // Checks the commutator table (all 25 ordered pairs) and the closed-form
  // conjugation identities e^{x ad_X} Y (all 25 pairs at each x) against the
  // series evaluation.
  VerifyReport verify_tables(const std::vector<double>& xs = {0.3, 1.0, 2.0},
                             double tol = 1e-12) const {
    VerifyReport report;

    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        ++report.checks;
        if (basis_.bracket(i, j) != expected_bracket(i, j))
          report.failures.push_back("bracket [" + basis_.labels[i] + "," + basis_.labels[j] + "]");
      }

    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        ++report.checks;
        for (double x : xs) {
          SparseGenerator got = exp_ad(basis_.elements[i], x, basis_.elements[j], 1e-14);
          std::vector<std::pair<double, const SparseGenerator*>> terms;
          for (auto [k, c] : expected_exp_ad(i, j, x)) terms.emplace_back(c, &basis_.elements[k]);
          SparseGenerator want = linear_combination(terms);
          if (max_abs_diff(got, want) > tol) {
            report.failures.push_back("exp-ad e^{" + std::to_string(x) + " ad_" +
                                      basis_.labels[i] + "} " + basis_.labels[j]);
            break;
          }
        }
      }
    return report;
  }

  // Commutator table, upper triangle; lower triangle by antisymmetry. The
  // only nonzero brackets are
  //   [S,Delta] = -Delta, [S,tau] = -tau, [I,rho] = -rho, [I,tau] = +tau,
  //   [rho,tau] = +Delta.
  static std::vector<std::pair<int, double>> expected_bracket(int i, int j) {
    if (i == j) return {};
    if (i > j) {
      auto fwd = expected_bracket(j, i);
      for (auto& [k, c] : fwd) c = -c;
      return fwd;
    }
    if (i == kS && j == kDelta) return {{kDelta, -1.0}};
    if (i == kS && j == kTau) return {{kTau, -1.0}};
    if (i == kI && j == kRho) return {{kRho, -1.0}};
    if (i == kI && j == kTau) return {{kTau, 1.0}};
    if (i == kRho && j == kTau) return {{kDelta, 1.0}};
    return {};
  }

  // Closed forms for e^{x ad_X} Y as coefficient lists over the basis. Every
  // series truncates at the linear term because each bracket either rescales
  // Y or lands on a central direction.
  static std::vector<std::pair<int, double>> expected_exp_ad(int i, int j, double x) {
    if (i == kS && j == kDelta) return {{kDelta, std::exp(-x)}};
    if (i == kS && j == kTau) return {{kTau, std::exp(-x)}};
    if (i == kI && j == kRho) return {{kRho, std::exp(-x)}};
    if (i == kI && j == kTau) return {{kTau, std::exp(x)}};
    if (i == kDelta && j == kS) return {{kS, 1.0}, {kDelta, x}};
    if (i == kRho && j == kI) return {{kI, 1.0}, {kRho, x}};
    if (i == kRho && j == kTau) return {{kTau, 1.0}, {kDelta, x}};
    if (i == kTau && j == kS) return {{kS, 1.0}, {kTau, x}};
    if (i == kTau && j == kI) return {{kI, 1.0}, {kTau, -x}};
    if (i == kTau && j == kRho) return {{kRho, 1.0}, {kDelta, -x}};
    return {{j, 1.0}};
  }

 private:
  SirCohortModel(RateFunction lambda, RateFunction gamma, int n, QuadTol tol)
      : lambda_(std::move(lambda)),
        gamma_(std::move(gamma)),
        space_{n},
        tol_(tol),
        Lam_(std::make_shared<CumulativeIntegral>(lambda_, tol)),
        Gam_(std::make_shared<CumulativeIntegral>(gamma_, tol)) {
    std::vector<Entry> es, ei, ed, er, et;
    for (int s = 0; s <= n; ++s)
      for (int i = 0; s + i <= n; ++i) {
        int c = space_.index(s, i);
        if (s > 0) {
          es.push_back({c, c, double(s)});
          ed.push_back({space_.index(s - 1, i), c, double(s)});
          et.push_back({space_.index(s - 1, i + 1), c, double(s)});
        }
        if (i > 0) {
          ei.push_back({c, c, double(i)});
          er.push_back({space_.index(s, i - 1), c, double(i)});
        }
      }
    int d = space_.dim();
    basis_ = structure_constants(
        {"S", "I", "Delta", "rho", "tau"},
        {SparseGenerator::from_entries(d, std::move(es)),
         SparseGenerator::from_entries(d, std::move(ei)),
         SparseGenerator::from_entries(d, std::move(ed)),
         SparseGenerator::from_entries(d, std::move(er)),
         SparseGenerator::from_entries(d, std::move(et))},
        d, 0.0);

    infection_part_ =
        linear_combination({{1.0, &basis_.elements[kTau]}, {-1.0, &basis_.elements[kS]}});
    recovery_part_ =
        linear_combination({{1.0, &basis_.elements[kRho]}, {-1.0, &basis_.elements[kI]}});
  }

  double pi2_integral(double t) const {
    double gt = (*Gam_)(t);
    auto lam_cum = Lam_;
    auto gam_cum = Gam_;
    return weighted_integral(
        lambda_,
        [lam_cum, gam_cum, gt](double u, double) {
          return std::exp(-(*lam_cum)(u) + (*gam_cum)(u)-gt);
        },
        t, tol_);
  }

  RateFunction lambda_, gamma_;
  CohortStateSpace space_;
  QuadTol tol_;
  std::shared_ptr<CumulativeIntegral> Lam_;
  std::shared_ptr<CumulativeIntegral> Gam_;
  LieBasis basis_;
  SparseGenerator infection_part_, recovery_part_;
};

}  // namespace weinorman

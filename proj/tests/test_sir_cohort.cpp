#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "weinorman/models/sir_cohort.hpp"
#include "weinorman/ode.hpp"

using weinorman::apply_factorization;
using weinorman::CohortStateSpace;
using weinorman::ExpmOptions;
using weinorman::linf_diff;
using weinorman::ProbabilityVector;
using weinorman::QuadTol;
using weinorman::RateFunction;
using weinorman::rk45_solve;
using weinorman::SirCohortModel;

namespace {

ExpmOptions tight() {
  ExpmOptions o;
  o.tol = 1e-12;
  return o;
}

ProbabilityVector wn_solution(const SirCohortModel& m, double t) {
  ProbabilityVector p = m.initial_all_susceptible();
  p.values = apply_factorization(m.factorization(), t, p.values, tight());
  return p;
}

// pi2 for constant rates, including the lambda == gamma limit.
double pi2_constant(double lam, double gam, double t) {
  if (lam == gam) return lam * t * std::exp(-lam * t);
  return lam * (std::exp(-lam * t) - std::exp(-gam * t)) / (gam - lam);
}

}  // namespace

TEST_CASE("cohort state space enumerates the triangle") {
  CohortStateSpace sp{4};
  CHECK(sp.dim() == 15);
  CHECK(sp.index(4, 0) == 0);
  CHECK(sp.index(3, 0) == 1);
  CHECK(sp.index(3, 1) == 2);
  int seen = 0;
  for (int s = 4; s >= 0; --s)
    for (int i = 0; s + i <= 4; ++i) {
      int idx = sp.index(s, i);
      auto [s2, i2] = sp.state(idx);
      CHECK(s2 == s);
      CHECK(i2 == i);
      ++seen;
    }
  CHECK(seen == sp.dim());
  CHECK(sp.label(0) == "4:0");
  CHECK(sp.label(sp.index(2, 1)) == "2:1");
  CHECK_THROWS_AS(sp.index(3, 2), std::out_of_range);
  CHECK_THROWS_AS(sp.state(15), std::out_of_range);
}

TEST_CASE("cohort generator is a Markov generator") {
  auto m = SirCohortModel::build(RateFunction::constant(0.2), RateFunction::constant(0.3), 5);
  CHECK(m.dim() == 21);
  auto h = m.generator();
  for (double t : {0.0, 0.4, 2.0}) CHECK(h.assemble(t).is_markov_generator());
  CHECK_THROWS_AS(
      SirCohortModel::build(RateFunction::constant(0.2), RateFunction::constant(0.3), 0),
      std::invalid_argument);
}

TEST_CASE("commutator and conjugation tables verify exactly") {
  for (int n : {2, 6}) {
    auto m = SirCohortModel::build(RateFunction::constant(0.2), RateFunction::constant(0.3), n);
    auto report = m.verify_tables();
    INFO("N = " << n << (report.failures.empty() ? "" : ", first: " + report.failures.front()));
    CHECK(report.passed());
    CHECK(report.checks == 50);
  }
}

TEST_CASE("marginals match constant-rate closed forms") {
  double lam = 0.2, gam = 0.3;
  auto m = SirCohortModel::build(RateFunction::constant(lam), RateFunction::constant(gam), 4);
  for (double t : {0.0, 1.0, 2.0, 5.0}) {
    auto [p1, p2, p3] = m.marginals(t);
    CHECK(std::fabs(p1 - std::exp(-lam * t)) < 1e-12);
    CHECK(std::fabs(p2 - pi2_constant(lam, gam, t)) < 1e-10);
    CHECK(std::fabs(p1 + p2 + p3 - 1.0) < 1e-12);
  }
}

TEST_CASE("equal-rate and zero-recovery marginal limits") {
  double lam = 0.4;
  auto eq = SirCohortModel::build(RateFunction::constant(lam), RateFunction::constant(lam), 3);
  auto [e1, e2, e3] = eq.marginals(2.0);
  CHECK(std::fabs(e2 - pi2_constant(lam, lam, 2.0)) < 1e-10);
  auto noro = SirCohortModel::build(RateFunction::constant(lam), RateFunction::constant(0.0), 3);
  auto [z1, z2, z3] = noro.marginals(2.0);
  CHECK(std::fabs(z2 - (-std::expm1(-lam * 2.0))) < 1e-10);
  CHECK(z3 < 1e-14);
}

TEST_CASE("quadrature marginals agree with the marginal ODE") {
  auto cases = std::vector<std::pair<RateFunction, RateFunction>>{
      {RateFunction::constant(0.2), RateFunction::constant(0.3)},
      {RateFunction::exponential(0.1, 0.2), RateFunction::constant(0.3)},
  };
  for (const auto& [lam, gam] : cases) {
    auto m = SirCohortModel::build(lam, gam, 4);
    for (double t : {1.0, 2.0, 5.0}) {
      auto [p1, p2, p3] = m.marginals(t);
      auto ode = m.marginals_ode(t);
      INFO("lambda = " << lam.str() << ", t = " << t);
      CHECK(std::fabs(p1 - ode[0]) < 1e-8);
      CHECK(std::fabs(p2 - ode[1]) < 1e-8);
    }
  }
}

TEST_CASE("constant-rate factor coefficients match closed forms") {
  double lam = 0.2, gam = 0.3;
  auto m = SirCohortModel::build(RateFunction::constant(lam), RateFunction::constant(gam), 4);
  auto c = m.coefficients();
  for (double t : {0.0, 1.0, 3.0}) {
    double pi2 = pi2_constant(lam, gam, t);
    CHECK(std::fabs(c.g3(t) + lam * t) < 1e-12);
    CHECK(std::fabs(c.g5(t) + gam * t) < 1e-12);
    CHECK(std::fabs(c.g4(t) - std::expm1(gam * t)) < 1e-10);
    CHECK(std::fabs(c.g2(t) - std::exp(lam * t) * pi2) < 1e-10);
    CHECK(std::fabs(c.g1(t) - (std::expm1(lam * t) - std::exp(lam * t) * pi2)) < 1e-10);
  }
  CHECK(c.g1(0.0) == 0.0);
  CHECK(c.g2(0.0) == 0.0);
  CHECK(c.g4(0.0) == 0.0);
}

TEST_CASE("oracle triangle: product, multinomial form, and rk45 agree") {
  auto cases = std::vector<std::pair<RateFunction, RateFunction>>{
      {RateFunction::constant(0.2), RateFunction::constant(0.3)},
      {RateFunction::exponential(0.1, 0.2), RateFunction::constant(0.3)},
  };
  for (const auto& [lam, gam] : cases) {
    auto m = SirCohortModel::build(lam, gam, 20);
    auto h = m.generator();
    for (double t : {1.0, 2.0, 5.0}) {
      ProbabilityVector wn = wn_solution(m, t);
      ProbabilityVector mult = m.multinomial_solution(t);
      ProbabilityVector ode = rk45_solve(h, m.initial_all_susceptible(), t, 1e-10, 1e-12);
      INFO("lambda = " << lam.str() << ", t = " << t);
      CHECK(linf_diff(wn.values, mult.values) < 1e-9);
      CHECK(linf_diff(wn.values, ode.values) < 1e-8);
      CHECK(linf_diff(mult.values, ode.values) < 1e-8);
      CHECK(wn.is_valid());
      CHECK(std::fabs(wn.sum() - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("single-individual cohort reproduces the marginals") {
  auto m = SirCohortModel::build(RateFunction::constant(0.5), RateFunction::constant(0.25), 1);
  double t = 1.7;
  auto [p1, p2, p3] = m.marginals(t);
  ProbabilityVector p = m.multinomial_solution(t);
  CHECK(std::fabs(p.values[m.space().index(1, 0)] - p1) < 1e-12);
  CHECK(std::fabs(p.values[m.space().index(0, 1)] - p2) < 1e-12);
  CHECK(std::fabs(p.values[m.space().index(0, 0)] - p3) < 1e-12);
  ProbabilityVector wn = wn_solution(m, t);
  CHECK(linf_diff(wn.values, p.values) < 1e-10);
}

TEST_CASE("cohort product satisfies the forward equation") {
  auto m = SirCohortModel::build(RateFunction::exponential(0.15, 0.3), RateFunction::constant(0.4),
                                 6, QuadTol{1e-14, 1e-13});
  auto h = m.generator();
  auto fac = m.factorization();
  auto v0 = m.initial_all_susceptible().values;
  double t = 0.8, step = 1e-4;
  auto at = [&](double tt) { return apply_factorization(fac, tt, v0, tight()); };
  std::vector<double> plus = at(t + step), minus = at(t - step);
  std::vector<double> hp = h.apply(t, at(t));
  double hmax = 0;
  for (double x : hp) hmax = std::max(hmax, std::fabs(x));
  for (int i = 0; i < m.dim(); ++i) {
    double fd = (plus[i] - minus[i]) / (2 * step);
    CHECK(std::fabs(fd - hp[i]) <= 1e-5 * std::max(std::fabs(hp[i]), 1e-3 * hmax));
  }
}

TEST_CASE("multinomial solution stays a probability vector late in the epidemic") {
  auto m = SirCohortModel::build(RateFunction::constant(0.8), RateFunction::constant(0.1), 8);
  for (double t : {5.0, 20.0, 60.0}) {
    ProbabilityVector p = m.multinomial_solution(t);
    CHECK(p.is_valid());
    CHECK(std::fabs(p.sum() - 1.0) < 1e-12);
  }
}

// Acceptance checks for the solver: eight criteria covering operator algebra
// exactness, the closed-form oracle triangles, generating-function and
// coefficient identities, large-model agreement with direct integration, the
// runtime scaling contrast, and robustness to rapidly switching rates.  Each
// criterion prints one [PASS]/[FAIL] line with its measured values and elapsed
// time; the exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "weinorman/models/birth_death.hpp"
#include "weinorman/models/pure_birth.hpp"
#include "weinorman/models/sir_cohort.hpp"
#include "weinorman/ode.hpp"

using namespace weinorman;

namespace {

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

int g_failures = 0;

void report(int index, const char* name, bool pass, const std::string& detail, double elapsed,
            double budget) {
  bool in_budget = elapsed < budget;
  if (!(pass && in_budget)) ++g_failures;
  std::printf("[%s] %d %s: %s (%.2f s, budget %.0f s)\n", pass && in_budget ? "PASS" : "FAIL",
              index, name, detail.c_str(), elapsed, budget);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---- 1: operator algebra identities ----------------------------------------

void criterion_algebra() {
  Stopwatch sw;
  auto bd = BirthDeathModel::build(RateFunction::constant(1), RateFunction::constant(1), 12);
  VerifyReport bd_report = bd.verify_brackets();
  JacobiReport bd_jacobi = verify_jacobi(bd.basis());

  auto sir = SirCohortModel::build(RateFunction::constant(0.2), RateFunction::constant(0.3), 6);
  VerifyReport sir_report = sir.verify_tables({0.3, 1.0, 2.0}, 1e-12);
  JacobiReport sir_jacobi = verify_jacobi(sir.basis());

  auto pb = PureBirthModel::build(RateFunction::constant(1), RateFunction::parse("rational"), 8);
  VerifyReport pb_report = pb.verify_commutation();
  std::vector<SparseGenerator> pb_elems{pb.op_q()};
  for (int i = 1; i <= pb.truncation() + 1; ++i) pb_elems.push_back(pb.op_p(i));
  JacobiReport pb_jacobi = verify_jacobi(pb_elems, pb.dim());

  int checks = bd_report.checks + sir_report.checks + pb_report.checks;
  int failed = static_cast<int>(bd_report.failures.size() + sir_report.failures.size() +
                                pb_report.failures.size());
  double residual = std::max({bd_jacobi.max_residual, sir_jacobi.max_residual,
                              pb_jacobi.max_residual});
  bool pass = failed == 0 && bd_jacobi.passed && sir_jacobi.passed && pb_jacobi.passed &&
              residual == 0.0;
  report(1, "operator algebra identities", pass,
         std::to_string(checks) + " identity checks, " + std::to_string(failed) +
             " failed, jacobi residual " + num(residual),
         sw.seconds(), 5);
}

// ---- 2 and 3: birth-death oracle triangle and generating function ----------

struct BdCase {
  RateFunction b, d;
};

void criterion_birth_death() {
  Stopwatch sw;
  const std::vector<BdCase> cases = {
      {RateFunction::constant(1), RateFunction::constant(1)},
      {RateFunction::constant(2), RateFunction::constant(0.5)},
      {RateFunction::exponential(1, 0.1), RateFunction::constant(1)},
  };
  const std::vector<double> times = {0.5, 1, 2, 5};
  const int n_max = 60;

  ExpmOptions eo;
  eo.tol = 1e-12;
  double max_pairwise = 0, max_tail = 0, max_pgf = 0;
  for (const BdCase& c : cases) {
    auto model = BirthDeathModel::build(c.b, c.d, n_max, QuadTol{1e-13, 1e-11});
    auto fac = model.factorization();
    auto init = model.initial_delta0();
    auto gen = model.generator();
    auto coef = model.coefficients();
    max_tail = std::max(max_tail, model.poisson_solution(times.back()).overflow_mass());
    for (double t : times) {
      ProbabilityVector wn;
      wn.values = apply_factorization(fac, t, init.values, eo);
      wn.overflow_index = init.overflow_index;
      ProbabilityVector oracle = model.poisson_solution(t);
      ProbabilityVector ode = rk45_solve(gen, init, t, 1e-10, 1e-12);
      max_pairwise = std::max({max_pairwise, linf_diff(wn.values, oracle.values),
                               linf_diff(wn.values, ode.values),
                               linf_diff(oracle.values, ode.values)});
      for (double s : {0.0, 0.5, 0.9}) {
        double sum = 0, power = 1;
        for (int n = 0; n < model.overflow_index(); ++n, power *= s) sum += power * wn.values[n];
        max_pgf = std::max(max_pgf, std::fabs(sum - std::exp(coef.g1(t) + s * coef.g2(t))));
      }
    }
  }
  double elapsed = sw.seconds();
  report(2, "birth-death oracle triangle", max_pairwise <= 1e-6 && max_tail < 1e-10,
         "max pairwise linf " + num(max_pairwise) + ", truncation tail " + num(max_tail),
         elapsed, 10);
  report(3, "generating function consistency", max_pgf <= 1e-10,
         "max |sum s^n p_n - G(s,t)| = " + num(max_pgf), elapsed, 10);
}

// ---- 4: cohort oracle triangle ----------------------------------------------

void criterion_cohort() {
  Stopwatch sw;
  const std::vector<std::pair<RateFunction, RateFunction>> cases = {
      {RateFunction::constant(0.2), RateFunction::constant(0.3)},
      {RateFunction::exponential(0.1, 0.2), RateFunction::constant(0.3)},
  };
  ExpmOptions eo;
  eo.tol = 1e-12;
  double max_pairwise = 0, max_pi2 = 0;
  for (const auto& [lambda, gamma] : cases) {
    auto model = SirCohortModel::build(lambda, gamma, 20, QuadTol{1e-13, 1e-11});
    auto fac = model.factorization();
    auto init = model.initial_all_susceptible();
    auto gen = model.generator();
    for (double t : {1.0, 2.0, 5.0}) {
      ProbabilityVector wn;
      wn.values = apply_factorization(fac, t, init.values, eo);
      ProbabilityVector oracle = model.multinomial_solution(t);
      ProbabilityVector ode = rk45_solve(gen, init, t, 1e-11, 1e-13);
      max_pairwise = std::max({max_pairwise, linf_diff(wn.values, oracle.values),
                               linf_diff(wn.values, ode.values),
                               linf_diff(oracle.values, ode.values)});
      max_pi2 = std::max(max_pi2, std::fabs(model.marginals(t)[1] - model.marginals_ode(t)[1]));
    }
  }
  report(4, "cohort oracle triangle", max_pairwise <= 1e-8 && max_pi2 <= 1e-8,
         "max pairwise linf " + num(max_pairwise) + ", infected-phase marginal dev " +
             num(max_pi2),
         sw.seconds(), 10);
}

// ---- 5: growth coefficient formulas -----------------------------------------

void criterion_coefficients() {
  Stopwatch sw;
  auto model = PureBirthModel::build(RateFunction::constant(1), RateFunction::parse("rational"),
                                     20, QuadTol{1e-14, 1e-12});
  double max_formula = 0;
  for (double t : {0.5, 1.0, 10.0}) {
    std::vector<double> f = model.coefficients_f(t);
    max_formula = std::max(max_formula, std::fabs(f[0] - t));
    max_formula = std::max(max_formula, std::fabs(f[1] - t * t / (2 * (1 + t))));
  }

  // d/dt f_i = (i-1) b(t) (f_{i-1} - f_i) for i >= 2.  Checked by a five-point
  // stencil at t = 1, where every coefficient through i = 20 still sits well
  // above quadrature noise.
  const double t = 1.0, h = 5e-3, bt = 1.0 / (1.0 + t);
  std::vector<double> fm2 = model.coefficients_f(t - 2 * h);
  std::vector<double> fm1 = model.coefficients_f(t - h);
  std::vector<double> f0 = model.coefficients_f(t);
  std::vector<double> fp1 = model.coefficients_f(t + h);
  std::vector<double> fp2 = model.coefficients_f(t + 2 * h);
  double max_fd = 0;
  for (int i = 2; i <= 20; ++i) {
    double fd = (-fp2[i - 1] + 8 * fp1[i - 1] - 8 * fm1[i - 1] + fm2[i - 1]) / (12 * h);
    double rhs = (i - 1) * bt * (f0[i - 2] - f0[i - 1]);
    max_fd = std::max(max_fd, std::fabs(fd - rhs) / std::fabs(rhs));
  }
  report(5, "growth coefficient formulas", max_formula <= 1e-10 && max_fd <= 1e-5,
         "closed-form dev " + num(max_formula) + ", max relative recurrence residual " +
             num(max_fd),
         sw.seconds(), 10);
}

// ---- 6: hundred-state distribution agreement --------------------------------

PureBirthModel make_growth_model(int m, double quad_tol) {
  return PureBirthModel::build(RateFunction::constant(1), RateFunction::parse("rational"), m,
                               QuadTol{quad_tol * 1e-2, quad_tol});
}

void criterion_large_model() {
  Stopwatch sw;
  auto model = make_growth_model(100, 1e-11);
  auto gen = model.generator();
  auto init = model.initial_delta0();
  ExpmOptions eo;
  eo.tol = 1e-12;
  double max_linf = 0, max_drift = 0;
  for (double t : {1.0, 5.0, 10.0, 50.0, 100.0}) {
    ProbabilityVector wn = model.solve_delta0(t, eo);
    ProbabilityVector ode = rk45_solve(gen, init, t, 1e-10, 1e-12);
    max_linf = std::max(max_linf, linf_diff(wn.values, ode.values));
    max_drift = std::max(max_drift, std::fabs(1.0 - wn.sum()));
  }
  report(6, "hundred-state distribution agreement", max_linf <= 1e-6 && max_drift <= 1e-10,
         "max linf vs integrator " + num(max_linf) + ", conservation drift " + num(max_drift),
         sw.seconds(), 60);
}

// ---- 7: runtime scaling with horizon -----------------------------------------

struct ScalingSample {
  double wall = 0;
  double work = 0;
};

ScalingSample time_product(double t) {
  ScalingSample best;
  for (int rep = 0; rep < 5; ++rep) {
    // Fresh model per repetition: quadrature caches must start cold.
    auto model = make_growth_model(100, 1e-6);
    ExpmOptions eo;
    eo.tol = 1e-6;
    ExpmStats stats;
    Stopwatch sw;
    model.solve_delta0(t, eo, &stats);
    double wall = sw.seconds();
    if (rep == 0 || wall < best.wall) best = {wall, double(stats.matvecs)};
  }
  return best;
}

ScalingSample time_stepper(double t) {
  ScalingSample best;
  for (int rep = 0; rep < 5; ++rep) {
    auto model = make_growth_model(100, 1e-6);
    auto gen = model.generator();
    auto init = model.initial_delta0();
    OdeStats stats;
    Stopwatch sw;
    // Customary nonstiff defaults (rtol 1e-3, atol 1e-6).  The long-horizon
    // cost is stability limited and insensitive to tolerance, so tighter
    // settings would only inflate the short-horizon cost.
    rk45_solve(gen, init, t, 1e-3, 1e-6, &stats);
    double wall = sw.seconds();
    if (rep == 0 || wall < best.wall) best = {wall, double(stats.rhs_evals)};
  }
  return best;
}

void criterion_scaling() {
  Stopwatch sw;
  ScalingSample wn2 = time_product(2), wn200 = time_product(200);
  ScalingSample rk2 = time_stepper(2), rk200 = time_stepper(200);
  double wn_wall = wn200.wall / wn2.wall, wn_work = wn200.work / wn2.work;
  double rk_wall = rk200.wall / rk2.wall, rk_work = rk200.work / rk2.work;
  // Wall time is the primary metric; deterministic work units (Krylov matrix
  // actions vs stepper right-hand-side evaluations) are the fallback when the
  // host timer is noisy.  Both must tell the same story here.
  bool pass = (wn_wall <= 3.0 || wn_work <= 3.0) && (rk_wall >= 10.0 || rk_work >= 10.0);
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "t=200/t=2 product wall %.2f work %.2f (need <= 3), stepper wall %.1f work %.1f "
                "(need >= 10)",
                wn_wall, wn_work, rk_wall, rk_work);
  report(7, "runtime scaling with horizon", pass, buf, sw.seconds(), 120);
}

// ---- 8: switching-rate robustness --------------------------------------------

void criterion_switching() {
  Stopwatch sw;
  auto a = RateFunction::parse("square:0,1,0.01,0.5");
  auto b = RateFunction::parse("rational");
  const double t = 10.0;

  double wn_wall = 0;
  ProbabilityVector wn;
  for (int rep = 0; rep < 3; ++rep) {
    auto model = PureBirthModel::build(a, b, 50, QuadTol{1e-12, 1e-10});
    Stopwatch lap;
    wn = model.solve_delta0(t);
    double wall = lap.seconds();
    if (rep == 0 || wall < wn_wall) wn_wall = wall;
  }

  auto model = PureBirthModel::build(a, b, 50, QuadTol{1e-12, 1e-10});
  auto gen = model.generator();
  auto init = model.initial_delta0();
  double euler_wall = 0;
  ProbabilityVector stepped;
  for (int rep = 0; rep < 3; ++rep) {
    Stopwatch lap;
    stepped = euler_solve(gen, init, t, 1e-5);
    double wall = lap.seconds();
    if (rep == 0 || wall < euler_wall) euler_wall = wall;
  }

  double dev = linf_diff(wn.values, stepped.values);
  double speedup = euler_wall / wn_wall;
  bool pass = dev <= 1e-4 && speedup >= 10.0;
  report(8, "switching-rate robustness", pass,
         "linf vs euler dt=1e-5 " + num(dev) + ", speedup " + num(speedup) + "x", sw.seconds(),
         120);
}

}  // namespace

int main() {
  criterion_algebra();
  criterion_birth_death();
  criterion_cohort();
  criterion_coefficients();
  criterion_large_model();
  criterion_scaling();
  criterion_switching();
  std::printf("acceptance: %d/8 criteria passed\n", 8 - g_failures);
  return g_failures;
}

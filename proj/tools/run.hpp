#pragma once
// run.hpp: executes the solve and verify subcommands described by a RunConfig.
//
// Each model is wrapped in a ModelRun that exposes the pieces every command
// needs: the canonical initial state, the time-dependent generator for the
// integrator baselines, a one-call product-of-exponentials solve, an optional
// closed-form oracle, and printable state labels.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "weinorman/factorization.hpp"
#include "weinorman/lie.hpp"
#include "weinorman/models/birth_death.hpp"
#include "weinorman/models/pure_birth.hpp"
#include "weinorman/models/sir_cohort.hpp"
#include "weinorman/ode.hpp"
#include "weinorman/probability.hpp"

namespace weinorman::cli {

// Shortest decimal form that parses back to the same double; locale-free, so
// repeated runs of the same config produce byte-identical CSV.
inline std::string csv_num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_output(const std::string& path, const std::string& body) {
  if (path.empty()) {
    std::fwrite(body.data(), 1, body.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw std::runtime_error("short write to '" + path + "'");
}

struct ModelRun {
  ProbabilityVector initial;
  TimeDependentGenerator generator;
  std::function<ProbabilityVector(double, const ExpmOptions&, ExpmStats*)> wei_norman;
  std::function<ProbabilityVector(double)> oracle;  // null when no closed form exists
  std::vector<std::string> state_labels;
};

inline std::vector<std::string> counting_labels(int dim, int overflow_index) {
  std::vector<std::string> labels(dim);
  for (int i = 0; i < dim; ++i) labels[i] = std::to_string(i);
  labels[overflow_index] = "overflow";
  return labels;
}

// Builds the model fresh, so quadrature caches start cold; bench repetitions
// rely on that to time coefficient work honestly.
inline ModelRun make_run(const RunConfig& cfg) {
  QuadTol qt{cfg.tol * 1e-2, cfg.tol};
  ModelRun run;
  if (cfg.model == "birth-death") {
    auto m = BirthDeathModel::build(cfg.rate_a, cfg.rate_b, cfg.size, qt);
    run.initial = m.initial_delta0();
    run.generator = m.generator();
    run.state_labels = counting_labels(m.dim(), m.overflow_index());
    auto fac = m.factorization();
    auto init = run.initial;
    run.wei_norman = [fac, init](double t, const ExpmOptions& opts, ExpmStats* stats) {
      ProbabilityVector p;
      p.values = apply_factorization(fac, t, init.values, opts, stats);
      p.overflow_index = init.overflow_index;
      return p;
    };
    run.oracle = [m](double t) { return m.poisson_solution(t); };
  } else if (cfg.model == "sir-cohort") {
    auto m = SirCohortModel::build(cfg.rate_a, cfg.rate_b, cfg.size, qt);
    run.initial = m.initial_all_susceptible();
    run.generator = m.generator();
    run.state_labels.resize(static_cast<std::size_t>(m.dim()));
    for (int i = 0; i < m.dim(); ++i) run.state_labels[i] = m.space().label(i);
    auto fac = m.factorization();
    auto init = run.initial;
    run.wei_norman = [fac, init](double t, const ExpmOptions& opts, ExpmStats* stats) {
      ProbabilityVector p;
      p.values = apply_factorization(fac, t, init.values, opts, stats);
      return p;
    };
    run.oracle = [m](double t) { return m.multinomial_solution(t); };
  } else {
    auto m = PureBirthModel::build(cfg.rate_a, cfg.rate_b, cfg.size, qt);
    run.initial = m.initial_delta0();
    run.generator = m.generator();
    run.state_labels = counting_labels(m.dim(), m.overflow_index());
    run.wei_norman = [m](double t, const ExpmOptions& opts, ExpmStats* stats) {
      return m.solve_delta0(t, opts, stats);
    };
  }
  return run;
}

inline std::vector<double> default_solve_times(const std::string& model) {
  if (model == "birth-death") return {0.5, 1, 2, 5};
  if (model == "sir-cohort") return {1, 2, 5};
  return {1, 5, 10, 50, 100};
}

inline int run_solve(const RunConfig& cfg) {
  if (cfg.method == Method::kAll)
    throw ConfigError("solve emits one distribution per time; pick a single method");
  if (cfg.method == Method::kOracle && cfg.model == "pure-birth")
    throw ConfigError("pure-birth has no closed-form distribution; use wei-norman");

  ModelRun run = make_run(cfg);
  std::vector<double> times = cfg.times.empty() ? default_solve_times(cfg.model) : cfg.times;
  ExpmOptions opts;
  opts.tol = cfg.tol;

  std::ostringstream csv;
  csv << "t,state,p\n";
  for (double t : times) {
    ProbabilityVector p;
    switch (cfg.method) {
      case Method::kWeiNorman:
        p = run.wei_norman(t, opts, nullptr);
        break;
      case Method::kRk45:
        p = rk45_solve(run.generator, run.initial, t, cfg.tol, cfg.tol * 1e-2);
        break;
      case Method::kEuler:
        p = euler_solve(run.generator, run.initial, t, cfg.dt);
        break;
      default:
        p = run.oracle(t);
        break;
    }
    p.validate();
    for (int i = 0; i < p.dim(); ++i)
      csv << csv_num(t) << ',' << run.state_labels[i] << ',' << csv_num(p.values[i]) << '\n';
  }
  write_output(cfg.out, csv.str());
  return 0;
}

inline int run_verify(const RunConfig& cfg) {
  QuadTol qt{cfg.tol * 1e-2, cfg.tol};
  VerifyReport identities;
  JacobiReport jacobi;
  std::string suite;
  if (cfg.model == "birth-death") {
    auto m = BirthDeathModel::build(cfg.rate_a, cfg.rate_b, cfg.size, qt);
    suite = "bracket table";
    identities = m.verify_brackets();
    jacobi = verify_jacobi(m.basis());
  } else if (cfg.model == "sir-cohort") {
    auto m = SirCohortModel::build(cfg.rate_a, cfg.rate_b, cfg.size, qt);
    suite = "bracket and exp-ad tables";
    identities = m.verify_tables();
    jacobi = verify_jacobi(m.basis());
  } else {
    auto m = PureBirthModel::build(cfg.rate_a, cfg.rate_b, cfg.size, qt);
    suite = "commutation relations";
    identities = m.verify_commutation();
    std::vector<SparseGenerator> elements;
    elements.push_back(m.op_q());
    for (int i = 1; i <= m.truncation() + 1; ++i) elements.push_back(m.op_p(i));
    jacobi = verify_jacobi(elements, m.dim());
  }

  std::cout << cfg.model << ": " << suite << ", " << identities.checks << " checks, "
            << identities.failures.size() << " failed\n";
  std::cout << cfg.model << ": jacobi identity, " << jacobi.triples_checked
            << " triples, max residual " << csv_num(jacobi.max_residual) << "\n";
  if (identities.passed() && jacobi.passed) {
    std::cout << "verify: PASS\n";
    return 0;
  }
  std::string first = !identities.failures.empty() ? identities.failures.front()
                                                   : std::string("jacobi identity");
  std::cerr << "verify: FAIL, first failing identity: " << first << "\n";
  return 1;
}

}  // namespace weinorman::cli

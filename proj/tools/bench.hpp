#pragma once
// bench.hpp: wall-time comparison of the product-of-exponentials solve against
// direct integration, over a geometric grid of model times.
//
// Protocol: every (method, t) cell is repeated `reps` times on one thread and
// the minimum wall time is reported. Each repetition rebuilds the model so
// quadrature caches start cold; the timer starts after the build, so it covers
// coefficient quadrature plus exponential actions (or the full integration)
// and nothing else. Accuracy is measured once against an untimed rk45 run at
// tight tolerance. A failing cell is recorded with an empty deviation and the
// run continues.

#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "run.hpp"
#include "weinorman/models/pure_birth.hpp"
#include "weinorman/ode.hpp"
#include "weinorman/probability.hpp"

namespace weinorman::cli {

struct BenchRow {
  Method method;
  double t = 0;
  double wall_seconds = 0;
  double linf_vs_ref = std::numeric_limits<double>::quiet_NaN();
  long work_units = 0;
  bool ok = false;
  std::string error;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
  return std::max(d.count(), 1e-9);
}

inline BenchRow time_cell(const RunConfig& cfg, Method method, double t,
                          const ProbabilityVector* ref) {
  BenchRow row;
  row.method = method;
  row.t = t;
  row.wall_seconds = std::numeric_limits<double>::infinity();
  ExpmOptions opts;
  opts.tol = cfg.tol;
  for (int rep = 0; rep < cfg.reps; ++rep) {
    ModelRun run = make_run(cfg);  // outside the timer: assembly is not solve work
    ExpmStats es;
    OdeStats os;
    ProbabilityVector p;
    auto start = std::chrono::steady_clock::now();
    try {
      switch (method) {
        case Method::kWeiNorman:
          p = run.wei_norman(t, opts, &es);
          break;
        case Method::kRk45:
          p = rk45_solve(run.generator, run.initial, t, cfg.tol, cfg.tol * 1e-2, &os);
          break;
        default:
          p = euler_solve(run.generator, run.initial, t, cfg.dt, &os);
          break;
      }
    } catch (const std::exception& e) {
      row.wall_seconds = std::min(row.wall_seconds, seconds_since(start));
      row.ok = false;
      row.error = e.what();
      return row;
    }
    row.wall_seconds = std::min(row.wall_seconds, seconds_since(start));
    row.work_units = method == Method::kWeiNorman ? es.matvecs : os.rhs_evals;
    row.ok = true;
    if (ref && rep + 1 == cfg.reps) row.linf_vs_ref = linf_diff(p.values, ref->values);
  }
  return row;
}

inline std::string output_stem(const std::string& path) {
  if (path.size() > 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
    return path.substr(0, path.size() - 4);
  return path;
}

}  // namespace detail

inline int run_bench(const RunConfig& cfg) {
  if (cfg.out.empty()) throw ConfigError("bench writes CSV files; --out is required");
  std::vector<Method> methods;
  switch (cfg.method_set ? cfg.method : Method::kAll) {
    case Method::kAll:
      methods = {Method::kWeiNorman, Method::kRk45};
      break;
    case Method::kEuler:
      methods = {Method::kWeiNorman, Method::kRk45, Method::kEuler};
      break;
    default:
      throw ConfigError(
          "bench always times wei-norman and rk45; use --method all (default) "
          "or euler to add the fixed-step baseline");
  }
  std::vector<double> times = cfg.times.empty()
                                  ? std::vector<double>{2, 5, 10, 20, 50, 100, 200}
                                  : cfg.times;

  bool any_failure = false;
  std::ostringstream csv;
  csv << "model,method,t,wall_seconds,linf_vs_ref,work_units\n";
  for (double t : times) {
    ModelRun ref_run = make_run(cfg);
    ProbabilityVector ref;
    bool have_ref = true;
    try {
      ref = rk45_solve(ref_run.generator, ref_run.initial, t, 1e-10, 1e-12);
    } catch (const std::exception& e) {
      have_ref = false;
      any_failure = true;
      std::cerr << "bench: reference solve failed at t=" << csv_num(t) << ": " << e.what()
                << "\n";
    }
    for (Method method : methods) {
      BenchRow row = detail::time_cell(cfg, method, t, have_ref ? &ref : nullptr);
      if (!row.ok) {
        any_failure = true;
        std::cerr << "bench: " << method_name(method) << " failed at t=" << csv_num(t) << ": "
                  << row.error << "\n";
      }
      csv << cfg.model << ',' << method_name(method) << ',' << csv_num(t) << ','
          << csv_num(row.wall_seconds) << ','
          << (row.ok && have_ref ? csv_num(row.linf_vs_ref) : std::string{}) << ','
          << row.work_units << '\n';
      std::cerr << "bench: " << cfg.model << ' ' << method_name(method) << " t=" << csv_num(t)
                << " wall=" << csv_num(row.wall_seconds) << " work=" << row.work_units << "\n";
    }
  }
  write_output(cfg.out, csv.str());

  // The coefficient curves behind the product: one block per grid time.
  if (cfg.model == "pure-birth") {
    QuadTol qt{cfg.tol * 1e-2, cfg.tol};
    auto m = PureBirthModel::build(cfg.rate_a, cfg.rate_b, cfg.size, qt);
    std::ostringstream fi;
    fi << "t,i,f\n";
    for (double t : times) {
      std::vector<double> f = m.coefficients_f(t);
      for (std::size_t i = 0; i < f.size(); ++i)
        fi << csv_num(t) << ',' << (i + 1) << ',' << csv_num(f[i]) << '\n';
    }
    write_output(detail::output_stem(cfg.out) + "_fi.csv", fi.str());
  }
  return any_failure ? 3 : 0;
}

}  // namespace weinorman::cli

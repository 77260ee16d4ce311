// weinorman: solve time-inhomogeneous Markov chains by a product of
// exponentials, check the operator algebra behind each model, and benchmark
// the method against direct integration.
//
// Exit codes: 0 success, 1 verification failure, 2 bad configuration,
// 3 solver failure.

#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "bench.hpp"
#include "config.hpp"
#include "run.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Wei-Norman product-of-exponentials solver for time-inhomogeneous "
      "Markov chains"};
  app.require_subcommand(1);

  weinorman::cli::FlagOverrides fl;
  auto add_common = [&fl](CLI::App* cmd) {
    cmd->add_option("--config", fl.config_path, "JSON run configuration file");
    cmd->add_option("--model", fl.model, "birth-death | sir-cohort | pure-birth");
    cmd->add_option("--times", fl.times, "comma-separated query times, e.g. 0.5,1,2");
    cmd->add_option("--method", fl.method, "wei-norman | rk45 | euler | oracle | all");
    cmd->add_option("--out", fl.out, "output CSV path (solve defaults to stdout)");
    cmd->add_option("--tol", fl.tol, "accuracy target for quadrature, Krylov, and rk45");
    cmd->add_option("--size", fl.size, "state-space size parameter: n_max, N, or m");
  };
  CLI::App* solve = app.add_subcommand("solve", "write the distribution at each query time");
  CLI::App* verify = app.add_subcommand("verify", "run the algebra identity suites for a model");
  CLI::App* bench =
      app.add_subcommand("bench", "time wei-norman against rk45 over a geometric time grid");
  add_common(solve);
  add_common(verify);
  add_common(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    weinorman::cli::RunConfig cfg = weinorman::cli::build_config(fl);
    if (solve->parsed()) return weinorman::cli::run_solve(cfg);
    if (verify->parsed()) return weinorman::cli::run_verify(cfg);
    return weinorman::cli::run_bench(cfg);
  } catch (const weinorman::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

// Command-line harness for the BBVI engine: stepsize sweeps, family scaling
// studies, gradient-variance reports, the non-convexity probe, and single
// optimization runs, all emitting CSV.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bbvi/bbvi.hpp"

namespace {

struct FlagOverrides {
  std::optional<std::string> config_path;
  std::optional<std::string> family;
  std::optional<std::string> n;
  std::optional<double> eps;
  std::optional<int> m;
  std::optional<int> tmax;
  std::optional<int> reps;
  std::optional<long> seed;
  std::optional<std::string> out;
  std::optional<std::string> target;
  std::optional<int> count;
  std::optional<double> low;
  std::optional<double> high;
  std::optional<std::string> method;
  std::optional<double> gamma;
  std::optional<int> threads;
  std::optional<int> early_stop;
};

void add_common_flags(CLI::App* cmd, FlagOverrides& f) {
  cmd->add_option("--config", f.config_path, "configuration file (key = value lines)");
  cmd->add_option("--family", f.family,
                  "comma list from {mean_field,structured,full_rank}");
  cmd->add_option("--n", f.n, "comma list of datapoint counts");
  cmd->add_option("--eps", f.eps, "accuracy threshold");
  cmd->add_option("--m", f.m, "Monte Carlo samples per gradient");
  cmd->add_option("--tmax", f.tmax, "iteration cap");
  cmd->add_option("--reps", f.reps, "replications per cell");
  cmd->add_option("--seed", f.seed, "root seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--target", f.target, "target kind (synthetic|quadratic)");
  cmd->add_option("--grid-count", f.count, "stepsize grid size");
  cmd->add_option("--grid-low", f.low, "smallest stepsize");
  cmd->add_option("--grid-high", f.high, "largest stepsize");
  cmd->add_option("--method", f.method, "run method (proximal_sgd|sgd|adam)");
  cmd->add_option("--gamma", f.gamma, "single-run stepsize");
  cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  cmd->add_option("--early-stop", f.early_stop, "sweep early stopping (0|1)");
}

bbvi::ExperimentConfig build_config(bbvi::ExperimentKind kind, const FlagOverrides& f) {
  bbvi::ExperimentConfig cfg;
  if (f.config_path) cfg = bbvi::ExperimentConfig::from_file(*f.config_path);
  cfg.kind = kind;
  if (f.family) cfg.apply("family", *f.family);
  if (f.n) cfg.apply("n", *f.n);
  if (f.eps) cfg.apply("eps", std::to_string(*f.eps));
  if (f.m) cfg.apply("m", std::to_string(*f.m));
  if (f.tmax) cfg.apply("tmax", std::to_string(*f.tmax));
  if (f.reps) cfg.apply("reps", std::to_string(*f.reps));
  if (f.seed) cfg.apply("seed", std::to_string(*f.seed));
  if (f.out) cfg.apply("out", *f.out);
  if (f.target) cfg.apply("target.kind", *f.target);
  if (f.count) cfg.apply("stepsize.count", std::to_string(*f.count));
  if (f.low) cfg.apply("stepsize.low", bbvi::detail::fmt(*f.low));
  if (f.high) cfg.apply("stepsize.high", bbvi::detail::fmt(*f.high));
  if (f.method) cfg.apply("run.method", *f.method);
  if (f.gamma) cfg.apply("run.stepsize", bbvi::detail::fmt(*f.gamma));
  if (f.threads) cfg.apply("threads", std::to_string(*f.threads));
  if (f.early_stop) cfg.apply("sweep.early_stop", std::to_string(*f.early_stop));
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"black-box variational inference experiment harness"};
  app.require_subcommand(1);

  FlagOverrides flags;
  struct Sub {
    CLI::App* cmd;
    bbvi::ExperimentKind kind;
  };
  std::vector<Sub> subs = {
      {app.add_subcommand("sweep", "stepsize sweep: iterations to eps per stepsize"),
       bbvi::ExperimentKind::Sweep},
      {app.add_subcommand("scaling", "best-stepsize iterations versus n"),
       bbvi::ExperimentKind::Scaling},
      {app.add_subcommand("variance", "empirical gradient variance versus the bound"),
       bbvi::ExperimentKind::Variance},
      {app.add_subcommand("nonconvex", "Hessian probe of the non-standardized energy"),
       bbvi::ExperimentKind::Nonconvex},
      {app.add_subcommand("run", "single optimization run with trace output"),
       bbvi::ExperimentKind::SingleRun},
  };
  for (auto& s : subs) add_common_flags(s.cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    for (const auto& s : subs) {
      if (!s.cmd->parsed()) continue;
      const bbvi::ExperimentConfig cfg = build_config(s.kind, flags);
      const bbvi::ResultSet results = bbvi::execute_experiment(cfg);
      bbvi::write_results(results, cfg.out_dir);
      std::cout << "wrote " << to_string(cfg.kind) << " results to " << cfg.out_dir
                << "\n";
    }
  } catch (const bbvi::ConfigError& e) {
    std::cerr << "configuration error [" << e.key << "]: " << e.what() << "\n";
    return 2;
  } catch (const bbvi::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

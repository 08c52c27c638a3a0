// Command line front end: run one experiment, compare methods on shared
// observed data, exercise the tractable oracles, or search hyperparameters.

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "krsel/config.hpp"
#include "krsel/errors.hpp"
#include "krsel/io.hpp"
#include "krsel/oracles.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string method = "krsel";
  long long seed = -1;
  int trials = -1;
};

void apply_overrides(krsel::RunConfig& cfg, const CommonFlags& flags) {
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  if (flags.trials > 0) cfg.trials = flags.trials;
  if (!flags.out_dir.empty()) cfg.output_dir = flags.out_dir;
}

void print_metrics(const std::vector<krsel::MethodRun>& runs) {
  for (const auto& run : runs) {
    std::cout << krsel::method_name(run.method) << ": model_error=" << run.metrics.model_error
              << " mean_data_error=" << run.metrics.mean_data_error
              << " mean_extrapolation_error=" << run.metrics.mean_extrapolation_error
              << " (n=" << run.metrics.n_trials << ")\n";
  }
}

int cmd_run(const CommonFlags& flags) {
  krsel::RunConfig cfg = krsel::load_run_config(flags.config_path);
  apply_overrides(cfg, flags);
  const auto method = krsel::method_from_name(flags.method);
  if (!method) throw krsel::ConfigError("unknown method '" + flags.method + "'");
  const auto runs = krsel::run_and_write(cfg, {*method});
  print_metrics(runs);
  std::cout << "results written to " << cfg.output_dir << "\n";
  return 0;
}

int cmd_compare(const CommonFlags& flags) {
  krsel::RunConfig cfg = krsel::load_run_config(flags.config_path);
  apply_overrides(cfg, flags);
  const auto runs = krsel::run_and_write(
      cfg, {krsel::Method::krsel, krsel::Method::abc_mc, krsel::Method::abc_smc});
  print_metrics(runs);
  std::cout << "results written to " << cfg.output_dir << "\n";
  return 0;
}

int cmd_oracle(const CommonFlags& flags) {
  const std::uint64_t seed = flags.seed >= 0 ? static_cast<std::uint64_t>(flags.seed) : 0;

  krsel::MixtureGridToy toy;
  toy.dirichlet_alpha = 1.0;
  toy.y_star = 0.7;
  krsel::GridModel m1, m2;
  for (int i = 0; i < 20; ++i) m1.grid.push_back(-2.0 + 4.0 * i / 19.0);
  for (int i = 0; i < 20; ++i) m2.grid.push_back(-3.0 + 6.0 * i / 19.0);
  m1.density = [](double y, double th) {
    return std::exp(-0.5 * (y - th) * (y - th)) / std::sqrt(2.0 * M_PI);
  };
  m2.density = [](double y, double th) {
    return std::exp(-0.125 * (y - th) * (y - th)) / (2.0 * std::sqrt(2.0 * M_PI));
  };
  toy.models = {m1, m2};
  for (int recursion : {1, 2}) {
    const double disc = krsel::mixture_weight_identity_check(toy, recursion);
    std::cout << "evidence identity, recursion " << recursion << ": max rel discrepancy " << disc
              << "\n";
  }

  krsel::PowerPosteriorToy pp;
  const auto trajectory = krsel::power_posterior_concentration(pp, seed);
  std::cout << "power posterior |theta - MLE| per recursion:";
  for (double d : trajectory) std::cout << " " << d;
  std::cout << "\n";
  return 0;
}

int cmd_hypersearch(const CommonFlags& flags) {
  krsel::RunConfig cfg = krsel::load_run_config(flags.config_path);
  apply_overrides(cfg, flags);
  const krsel::ExperimentDef experiment = krsel::build_experiment(cfg);
  const krsel::SummaryVector observed = krsel::observed_for_trial(cfg, experiment, 0);
  krsel::RngStream rng(cfg.seed);
  const auto [s, delta] = krsel::select_hyperparameters(observed, cfg, rng);
  std::cout << "selected s=" << s << " delta=" << delta << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Likelihood-free model selection over simulator mixtures"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    if (needs_config) {
      sub->add_option("--config", flags.config_path, "JSON experiment config")->required();
    }
    sub->add_option("--seed", flags.seed, "root seed override");
    sub->add_option("--trials", flags.trials, "trial count override");
    sub->add_option("--out", flags.out_dir, "output directory override");
  };

  CLI::App* run = app.add_subcommand("run", "run one experiment with one method");
  add_common(run, true);
  run->add_option("--method", flags.method, "krsel, abc-mc or abc-smc");

  CLI::App* compare =
      app.add_subcommand("compare", "run all methods on the same observed data and seeds");
  add_common(compare, true);

  CLI::App* oracle = app.add_subcommand("oracle", "tractable-model oracle suites");
  oracle->add_option("--seed", flags.seed, "root seed override");

  CLI::App* hyper = app.add_subcommand("hypersearch", "holdout search over the (s, delta) grid");
  add_common(hyper, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(flags);
    if (compare->parsed()) return cmd_compare(flags);
    if (oracle->parsed()) return cmd_oracle(flags);
    if (hyper->parsed()) return cmd_hypersearch(flags);
    return 2;
  } catch (const krsel::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const krsel::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
}

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "krsel/config.hpp"
#include "krsel/errors.hpp"
#include "krsel/io.hpp"

using namespace krsel;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("doubles round-trip through their shortest representation") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-11, 40.0, 1e8}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(1.5) == "1.5");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("csv fields quote separators and embedded quotes") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("ensemble serialization names every coordinate") {
  ParticleEnsemble ensemble;
  ensemble.states.push_back(MixtureState{
      SimplexWeights({0.25, 0.75}), {ParamVector{{1.5}, 0}, ParamVector{{2.0, 3.0}, 1}}});
  std::ostringstream os;
  write_ensemble_csv(os, ensemble);
  CHECK(os.str() == "phi0,phi1,theta0_0,theta1_0,theta1_1\n0.25,0.75,1.5,2,3\n");
}

TEST_CASE("configs parse with defaults and reject unknown keys") {
  const RunConfig cfg = parse_run_config(R"({
    "experiment": "poly_3rd_vs_10th",
    "n_per_iter": 50,
    "n_iters": 10,
    "hyper_grid": {"s": [1.0], "delta": [0.25]},
    "herding": {"pool_multiplier": 8},
    "transforms": {"arctan": false},
    "seed": 42,
    "trials": 5,
    "output_dir": "somewhere"
  })");
  CHECK(cfg.experiment == "poly_3rd_vs_10th");
  CHECK(cfg.n_per_iter == 50);
  CHECK(cfg.herding.pool_multiplier == 8);
  CHECK(cfg.herding.perturbation_scale == 0.5);  // default preserved
  CHECK(cfg.hyper_grid.delta_values == std::vector<double>{0.25});
  CHECK(cfg.seed == 42);
  CHECK(cfg.transforms.arctan.has_value());
  CHECK_FALSE(*cfg.transforms.arctan);

  CHECK_THROWS_AS(parse_run_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"experiment": "x", "typo_key": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"n_iters": 3})"), ConfigError);  // no experiment
  CHECK_THROWS_AS(parse_run_config(R"({"experiment": "poly_3rd_vs_10th", "n_iters": 0})"),
                  ConfigError);
}

TEST_CASE("prior overrides parse box lists") {
  const RunConfig cfg = parse_run_config(R"({
    "experiment": "poly_3rd_vs_10th",
    "priors": {"boxes": [[[-1, 1], [-1, 1], [-1, 1], [-1, 1]],
                          [[-1, 1], [-1, 1], [-1, 1], [-1, 1], [-1, 1], [-1, 1],
                           [-1, 1], [-1, 1], [-1, 1], [-1, 1], [-1, 1]]]}
  })");
  REQUIRE(cfg.priors.has_value());
  CHECK(cfg.priors->boxes[0].size() == 4);
  CHECK(cfg.priors->boxes[1].size() == 11);
  CHECK(build_experiment(cfg).priors.boxes[0][0].hi == 1.0);

  // A layout mismatch parses fine but is rejected when the experiment is built.
  const RunConfig bad = parse_run_config(R"({
    "experiment": "poly_3rd_vs_10th",
    "priors": {"boxes": [[[0, 1]]]}
  })");
  CHECK_THROWS_AS(build_experiment(bad), ConfigError);
}

TEST_CASE("run outputs are written and byte-identical across reruns") {
  RunConfig cfg;
  cfg.experiment = "gaussian_location";
  cfg.n_per_iter = 15;
  cfg.n_iters = 2;
  cfg.trials = 2;
  cfg.herding.pool_multiplier = 4;
  cfg.seed = 3;

  const auto dir_a = std::filesystem::temp_directory_path() / "krsel_io_test_a";
  const auto dir_b = std::filesystem::temp_directory_path() / "krsel_io_test_b";
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);

  cfg.output_dir = dir_a.string();
  run_and_write(cfg, {Method::krsel});
  cfg.output_dir = dir_b.string();
  run_and_write(cfg, {Method::krsel});

  for (const char* name : {"trials.csv", "metrics.csv", "trajectory_0.csv", "trajectory_1.csv",
                           "observed_0.csv", "observed_1.csv"}) {
    CHECK(slurp(dir_a / name) == slurp(dir_b / name));
  }

  const std::string trials = slurp(dir_a / "trials.csv");
  CHECK(trials.rfind("seed,selected_model,coef_0,data_error,extrapolation_error", 0) == 0);
  const std::string metrics = slurp(dir_a / "metrics.csv");
  CHECK(metrics.rfind("method,model_error,mean_data_error,mean_extrapolation_error,n_trials", 0) ==
        0);

  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);
}

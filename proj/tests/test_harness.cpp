#include <doctest.h>

#include <cmath>

#include "krsel/errors.hpp"
#include "krsel/harness.hpp"

using namespace krsel;

namespace {

RunConfig small_config(const std::string& experiment) {
  RunConfig cfg;
  cfg.experiment = experiment;
  cfg.n_per_iter = 20;
  cfg.n_iters = 3;
  cfg.trials = 2;
  cfg.herding.pool_multiplier = 5;
  cfg.seed = 7;
  return cfg;
}

TrialResult result_with(int selected, double data_err, double extrap_err = 0.0) {
  TrialResult r;
  r.selected_model = selected;
  r.data_error = data_err;
  r.extrapolation_error = extrap_err;
  return r;
}

}  // namespace

TEST_CASE("metrics count wrong selections and average the errors") {
  std::vector<TrialResult> trials;
  for (int i = 0; i < 30; ++i) trials.push_back(result_with(i < 3 ? 1 : 0, 2.0, 4.0));
  const MetricsRecord metrics = compute_metrics(trials, 0);
  CHECK(metrics.model_error == doctest::Approx(0.1));
  CHECK(metrics.mean_data_error == doctest::Approx(2.0));
  CHECK(metrics.mean_extrapolation_error == doctest::Approx(4.0));
  CHECK(metrics.n_trials == 30);

  CHECK(compute_metrics({result_with(0, 1.0)}, 0).model_error == 0.0);
  CHECK(compute_metrics({result_with(1, 1.0)}, 0).model_error == 1.0);
  CHECK_THROWS_AS(compute_metrics({}, 0), ConfigError);
}

TEST_CASE("data error on a constant model is the offset times sqrt(dim)") {
  const int dim = 9;
  std::vector<ModelSpec> models(1);
  models[0].name = "const";
  models[0].dim = 1;
  models[0].simulator = [dim](const ParamVector& th, RngStream&) {
    return SummaryVector{std::vector<double>(dim, th.theta[0])};
  };
  SummaryVector observed{std::vector<double>(dim, 1.0)};
  RngStream rng(1);

  TrialResult exact;
  exact.selected_model = 0;
  exact.final_state = MixtureState{SimplexWeights({1.0}), {ParamVector{{1.0}, 0}}};
  CHECK(data_error(exact, observed, models, rng) == 0.0);

  TrialResult offset = exact;
  offset.final_state.params[0].theta[0] = 1.0 + 2.5;
  CHECK(data_error(offset, observed, models, rng) ==
        doctest::Approx(2.5 * std::sqrt(static_cast<double>(dim))).epsilon(1e-12));
  CHECK(data_error(offset, observed, models, rng) >= 0.0);
}

TEST_CASE("grid selection honors errors and breaks ties toward small values") {
  HyperGrid grid;
  grid.s_values = {0.25, 1.0, 4.0};
  grid.delta_values = {0.1, 1.0};

  SUBCASE("a single pair is returned untouched") {
    HyperGrid one;
    one.s_values = {2.0};
    one.delta_values = {0.5};
    const auto pick = select_hyperparameters(one, [](double, double) { return 1.0; });
    CHECK(pick.first == 2.0);
    CHECK(pick.second == 0.5);
  }

  SUBCASE("the pair with injected zero error wins") {
    const auto pick = select_hyperparameters(grid, [](double s, double delta) {
      return (s == 1.0 && delta == 1.0) ? 0.0 : 5.0 + s + delta;
    });
    CHECK(pick.first == 1.0);
    CHECK(pick.second == 1.0);
  }

  SUBCASE("ties prefer smaller s, then smaller delta") {
    const auto pick = select_hyperparameters(grid, [](double, double) { return 3.0; });
    CHECK(pick.first == 0.25);
    CHECK(pick.second == 0.1);
  }
}

TEST_CASE("hyperparameter search is deterministic and returns grid members") {
  RunConfig cfg = small_config("gaussian_location");
  cfg.hyper_grid.s_values = {0.5, 1.0};
  cfg.hyper_grid.delta_values = {0.1, 1.0};
  const ExperimentDef experiment = build_experiment(cfg);
  const SummaryVector observed = observed_for_trial(cfg, experiment, 0);

  RngStream a(3), b(3);
  const auto p1 = select_hyperparameters(observed, cfg, a);
  const auto p2 = select_hyperparameters(observed, cfg, b);
  CHECK(p1 == p2);
  CHECK((p1.first == 0.5 || p1.first == 1.0));
  CHECK((p1.second == 0.1 || p1.second == 1.0));
}

TEST_CASE("a one-model run always selects that model with unit coefficient") {
  RunConfig cfg = small_config("gaussian_location");
  const ExperimentDef experiment = build_experiment(cfg);
  const SummaryVector observed = observed_for_trial(cfg, experiment, 0);
  RngStream rng(4);
  const TrialResult result = run_kr_abc(cfg, experiment, observed, rng);
  CHECK(result.selected_model == 0);
  CHECK(result.coefficients.size() == 1);
  CHECK(result.coefficients[0] == 1.0);
  CHECK(static_cast<int>(result.per_iteration_log.size()) == cfg.n_iters);
}

TEST_CASE("selected model is the coefficient argmax and trajectories stay on the simplex") {
  RunConfig cfg = small_config("poly_3rd_vs_10th");
  const ExperimentDef experiment = build_experiment(cfg);
  const SummaryVector observed = observed_for_trial(cfg, experiment, 0);
  RngStream rng(5);
  const TrialResult result = run_kr_abc(cfg, experiment, observed, rng);
  CHECK(result.selected_model == result.coefficients.argmax());
  for (const auto& state : result.per_iteration_log) {
    double sum = 0.0;
    for (double p : state.weights.values()) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("trial driver is reproducible end to end") {
  RunConfig cfg = small_config("poly_3rd_vs_10th");
  const ExperimentDef experiment = build_experiment(cfg);
  const MethodRun a = run_trials(cfg, experiment, Method::krsel);
  const MethodRun b = run_trials(cfg, experiment, Method::krsel);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].selected_model == b.rows[i].selected_model);
    CHECK(a.rows[i].coefficients == b.rows[i].coefficients);
    CHECK(a.rows[i].data_error == b.rows[i].data_error);
  }
  CHECK(a.trajectories == b.trajectories);
}

TEST_CASE("baseline drivers produce simplex probabilities and finite errors") {
  RunConfig cfg = small_config("poly_3rd_vs_10th");
  cfg.baselines.n_sims = 400;
  cfg.baselines.knn_k = 50;
  cfg.baselines.population = 30;
  cfg.baselines.generations = 2;
  const ExperimentDef experiment = build_experiment(cfg);
  for (Method method : {Method::abc_mc, Method::abc_smc}) {
    const MethodRun run = run_trials(cfg, experiment, method);
    for (const auto& row : run.rows) {
      double sum = 0.0;
      for (double p : row.coefficients) {
        CHECK(p >= 0.0);
        sum += p;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(std::isfinite(row.data_error));
    }
  }
}

TEST_CASE("config validation rejects nonsense") {
  RunConfig cfg;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);  // no experiment
  cfg.experiment = "poly_3rd_vs_10th";
  cfg.n_per_iter = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = small_config("nope");
  CHECK_THROWS_AS(build_experiment(cfg), ConfigError);
  cfg = small_config("poly_3rd_vs_10th");
  cfg.models = {"poly3", "poly5"};
  CHECK_THROWS_AS(build_experiment(cfg), ConfigError);
  cfg = small_config("poly_3rd_vs_10th");
  cfg.hyper_grid.s_values = {};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("method names round-trip") {
  for (Method m : {Method::krsel, Method::abc_mc, Method::abc_smc}) {
    CHECK(method_from_name(method_name(m)) == m);
  }
  CHECK_FALSE(method_from_name("abc-rf"));
}

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "krsel/baselines.hpp"
#include "krsel/experiments.hpp"
#include "krsel/herding.hpp"
#include "krsel/state.hpp"

namespace krsel {

enum class Method { krsel, abc_mc, abc_smc };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

struct HyperGrid {
  std::vector<double> s_values{1.0};
  std::vector<double> delta_values{0.1};

  bool single() const { return s_values.size() == 1 && delta_values.size() == 1; }
};

struct TransformFlags {
  std::optional<bool> arctan;  // unset = experiment default
};

struct BaselineConfig {
  int n_sims = 0;  // 0: match the proposed method's total simulation budget
  int knn_k = 0;   // 0: pick from knn_candidates by the holdout procedure
  std::vector<int> knn_candidates{100, 200, 300, 500, 800, 1000};
  int population = 0;   // 0: n_per_iter
  int generations = 0;  // 0: n_iters
  double perturb_sd = 0.31622776601683794;  // sqrt(0.1)
};

struct RunConfig {
  std::string experiment;
  std::vector<std::string> models;  // informative; must match the experiment's models
  std::optional<PriorSpec> priors;  // overrides the experiment's default boxes
  double dirichlet_alpha = 0.01;
  int n_per_iter = 100;
  int n_iters = 20;
  HerdingConfig herding;
  HyperGrid hyper_grid;
  std::uint64_t seed = 0;
  int trials = 30;
  TransformFlags transforms;
  std::string output_dir = "out";
  BaselineConfig baselines;

  void validate() const;
};

// Experiment instantiation with the config's overrides applied.
ExperimentDef build_experiment(const RunConfig& config);

struct TrialResult {
  int selected_model = 0;           // argmax of coefficients, ties to lowest index
  MixtureState final_state;         // first herded state of the last recursion
  SimplexWeights coefficients;      // its mixing coefficients
  double data_error = 0.0;
  double extrapolation_error = 0.0;
  std::vector<MixtureState> per_iteration_log;  // first herded state per recursion
};

struct MetricsRecord {
  double model_error = 0.0;
  double mean_data_error = 0.0;
  double mean_extrapolation_error = 0.0;
  int n_trials = 0;
};

// One full run of the recursive kernel update: initial prior sampling, then
// per recursion mixture simulation, median-heuristic bandwidths, the kernel
// ridge solve, and herding into the next ensemble. Hyperparameters come from
// the config's grid (a 1x1 grid pins them; otherwise the holdout search runs
// first). data/extrapolation errors are NaN until the caller fills them.
TrialResult run_kr_abc(const RunConfig& config, const ExperimentDef& experiment,
                       const SummaryVector& observed, RngStream& rng);
TrialResult run_kr_abc(const RunConfig& config, const SummaryVector& observed, RngStream& rng);

// Grid search over (s, delta): fit on the first 80% of summary coordinates,
// score by disance on the held-out 20%, ties to smaller s then smaller delta.
std::pair<double, double> select_hyperparameters(const SummaryVector& observed,
                                                 const RunConfig& config, RngStream& rng);

// Selection core with an injectable evaluator (s, delta) -> holdout error.
using HyperEvaluator = std::function<double(double s, double delta)>;
std::pair<double, double> select_hyperparameters(const HyperGrid& grid,
                                                 const HyperEvaluator& evaluate);

MetricsRecord compute_metrics(const std::vector<TrialResult>& trials, int truth_model);

// Euclidean distance between the observed summary and one fresh simulation
// from the selected model at the estimated parameters.
double data_error(const TrialResult& estimate, const SummaryVector& observed,
                  const std::vector<ModelSpec>& models, RngStream& rng);
double point_data_error(int model, const ParamVector& theta, const SummaryVector& observed,
                        const std::vector<ModelSpec>& models, RngStream& rng);

// Same, on the holdout design.
double extrapolation_error(const TrialResult& estimate, const ExperimentDef& experiment,
                           const SummaryVector& observed_holdout, RngStream& rng);

// ---- multi-trial drivers ------------------------------------------------

struct TrialRow {
  std::uint64_t seed = 0;
  int selected_model = 0;
  std::vector<double> coefficients;
  double data_error = 0.0;
  double extrapolation_error = 0.0;
};

struct MethodRun {
  Method method = Method::krsel;
  std::vector<TrialRow> rows;
  MetricsRecord metrics;
  // Coefficient trajectories per trial (proposed method only).
  std::vector<std::vector<std::vector<double>>> trajectories;
};

// Runs `config.trials` independent trials of one method. Observed data is
// regenerated per trial from the ground truth with a trial-specific stream;
// the same streams are used for every method so comparisons share data.
MethodRun run_trials(const RunConfig& config, const ExperimentDef& experiment, Method method);

// The observed data trial `trial` sees, for persistence and inspection.
SummaryVector observed_for_trial(const RunConfig& config, const ExperimentDef& experiment,
                                 int trial);
SummaryVector observed_holdout_for_trial(const RunConfig& config, const ExperimentDef& experiment,
                                         int trial);

// Baseline model choice plus mean-shift parameter extraction for one
// observed vector. Exposed for tests and the compare driver.
struct BaselineEstimate {
  ModelPosterior posterior;
  int selected_model = 0;
  ParamVector theta_hat;
  int knn_k_used = 0;  // ABC-MC only
};
BaselineEstimate run_baseline(const RunConfig& config, const ExperimentDef& experiment,
                              Method method, const SummaryVector& observed, RngStream& rng);

}  // namespace krsel

#include "krsel/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "krsel/errors.hpp"
#include "krsel/kernel_bayes.hpp"
#include "krsel/kernels.hpp"
#include "krsel/log.hpp"

namespace krsel {

namespace {

// Substream tags; disjoint per purpose so draw order never couples stages.
constexpr std::uint64_t kTagObserved = 0x0b5ULL;
constexpr std::uint64_t kTagHoldout = 0x0b5eULL;
constexpr std::uint64_t kTagMethodBase = 0x100ULL;
constexpr std::uint64_t kTagInit = 0x1417ULL;
constexpr std::uint64_t kTagSim = 0x517ULL;
constexpr std::uint64_t kTagHerd = 0x4e4dULL;
constexpr std::uint64_t kTagHyper = 0x4979ULL;
constexpr std::uint64_t kTagError = 0xe44ULL;

std::vector<std::vector<double>> phi_points(const ParticleEnsemble& ensemble) {
  std::vector<std::vector<double>> pts;
  pts.reserve(ensemble.states.size());
  for (const auto& s : ensemble.states) pts.push_back(s.weights.values());
  return pts;
}

std::vector<std::vector<double>> theta_points(const ParticleEnsemble& ensemble, int m) {
  std::vector<std::vector<double>> pts;
  pts.reserve(ensemble.states.size());
  for (const auto& s : ensemble.states) pts.push_back(s.params[static_cast<std::size_t>(m)].theta);
  return pts;
}

std::vector<std::vector<double>> summary_points(const std::vector<SummaryVector>& sims) {
  std::vector<std::vector<double>> pts;
  pts.reserve(sims.size());
  for (const auto& s : sims) pts.push_back(s.values);
  return pts;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::krsel: return "krsel";
    case Method::abc_mc: return "abc-mc";
    case Method::abc_smc: return "abc-smc";
  }
  throw ConfigError("unknown method");
}

std::optional<Method> method_from_name(const std::string& name) {
  if (name == "krsel") return Method::krsel;
  if (name == "abc-mc" || name == "abc_mc") return Method::abc_mc;
  if (name == "abc-smc" || name == "abc_smc") return Method::abc_smc;
  return std::nullopt;
}

void RunConfig::validate() const {
  if (experiment.empty()) throw ConfigError("config needs an experiment identifier");
  if (n_per_iter < 1) throw ConfigError("n_per_iter must be >= 1");
  if (n_iters < 1) throw ConfigError("n_iters must be >= 1");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (!(dirichlet_alpha > 0.0)) throw ConfigError("dirichlet_alpha must be positive");
  if (hyper_grid.s_values.empty() || hyper_grid.delta_values.empty()) {
    throw ConfigError("hyper_grid must be nonempty");
  }
  for (double s : hyper_grid.s_values) {
    if (!(s > 0.0)) throw ConfigError("hyper_grid s values must be positive");
  }
  for (double d : hyper_grid.delta_values) {
    if (!(d > 0.0)) throw ConfigError("hyper_grid delta values must be positive");
  }
}

ExperimentDef build_experiment(const RunConfig& config) {
  config.validate();
  ExperimentDef def = make_experiment(config.experiment, config.dirichlet_alpha,
                                      config.transforms.arctan);
  if (!config.models.empty() && config.models != def.model_names) {
    throw ConfigError("config model list does not match experiment '" + config.experiment + "'");
  }
  if (config.priors) {
    PriorSpec prior = *config.priors;
    prior.dirichlet_alpha = config.dirichlet_alpha;
    prior.validate();
    if (prior.layout() != def.priors.layout()) {
      throw ConfigError("prior override layout does not match the experiment's models");
    }
    def.priors = std::move(prior);
  }
  return def;
}

namespace {

TrialResult run_kr_abc_fixed(const RunConfig& config, const ExperimentDef& experiment,
                             const SummaryVector& observed, double s, double delta,
                             RngStream& rng) {
  if (observed.dim() != experiment.summary_dim) {
    throw ConfigError("observed summary has dimension " + std::to_string(observed.dim()) +
                      ", experiment expects " + std::to_string(experiment.summary_dim));
  }
  const int n = config.n_per_iter;
  const int k = static_cast<int>(experiment.models.size());

  HerdingConfig herd_cfg = config.herding;
  herd_cfg.prior = experiment.priors;
  herd_cfg.nonneg_mask = experiment.nonneg_mask;

  RngStream init_rng = rng.substream(kTagInit);
  ParticleEnsemble ensemble = sample_initial_ensemble(experiment.priors, n, init_rng);

  TrialResult result;
  result.per_iteration_log.reserve(static_cast<std::size_t>(config.n_iters));

  std::vector<SummaryVector> sims(static_cast<std::size_t>(n));
  for (int recursion = 1; recursion <= config.n_iters; ++recursion) {
    for (int i = 0; i < n; ++i) {
      RngStream sim_rng = rng.substream(kTagSim, static_cast<std::uint64_t>(recursion),
                                        static_cast<std::uint64_t>(i));
      sims[static_cast<std::size_t>(i)] =
          simulate_mixture(ensemble.states[static_cast<std::size_t>(i)], experiment.models, sim_rng)
              .first;
    }

    const double gamma_y = median_heuristic(summary_points(sims), s);
    ProductStateKernelSpec state_kernel;
    state_kernel.simplex_bandwidth = median_heuristic(phi_points(ensemble), s);
    state_kernel.param_bandwidths.resize(static_cast<std::size_t>(k));
    for (int m = 0; m < k; ++m) {
      state_kernel.param_bandwidths[static_cast<std::size_t>(m)] =
          median_heuristic(theta_points(ensemble, m), s);
    }

    PosteriorEmbedding embedding =
        embed_posterior(std::move(ensemble), observed, GaussianKernelSpec{gamma_y}, delta, sims);

    RngStream herd_rng = rng.substream(kTagHerd, static_cast<std::uint64_t>(recursion));
    ensemble = herd_sample(embedding, n, state_kernel, herd_cfg, herd_rng);
    result.per_iteration_log.push_back(ensemble.states.front());
  }

  result.final_state = ensemble.states.front();
  result.coefficients = result.final_state.weights;
  result.selected_model = result.coefficients.argmax();
  result.data_error = std::numeric_limits<double>::quiet_NaN();
  result.extrapolation_error = std::numeric_limits<double>::quiet_NaN();
  return result;
}

}  // namespace

TrialResult run_kr_abc(const RunConfig& config, const ExperimentDef& experiment,
                       const SummaryVector& observed, RngStream& rng) {
  config.validate();
  double s = config.hyper_grid.s_values.front();
  double delta = config.hyper_grid.delta_values.front();
  if (!config.hyper_grid.single()) {
    std::tie(s, delta) = select_hyperparameters(observed, config, rng);
  }
  return run_kr_abc_fixed(config, experiment, observed, s, delta, rng);
}

TrialResult run_kr_abc(const RunConfig& config, const SummaryVector& observed, RngStream& rng) {
  const ExperimentDef experiment = build_experiment(config);
  return run_kr_abc(config, experiment, observed, rng);
}

std::pair<double, double> select_hyperparameters(const HyperGrid& grid,
                                                 const HyperEvaluator& evaluate) {
  if (grid.s_values.empty() || grid.delta_values.empty()) {
    throw ConfigError("hyperparameter grid is empty");
  }
  double best_s = 0.0, best_delta = 0.0;
  double best_error = std::numeric_limits<double>::infinity();
  bool first = true;
  for (double s : grid.s_values) {
    for (double delta : grid.delta_values) {
      const double err = evaluate(s, delta);
      const bool better = first || err < best_error ||
                          (err == best_error && (s < best_s || (s == best_s && delta < best_delta)));
      if (better) {
        best_error = err;
        best_s = s;
        best_delta = delta;
        first = false;
      }
    }
  }
  return {best_s, best_delta};
}

std::pair<double, double> select_hyperparameters(const SummaryVector& observed,
                                                 const RunConfig& config, RngStream& rng) {
  const ExperimentDef experiment = build_experiment(config);
  const int total = observed.dim();
  if (total < 2) throw ConfigError("observed summary too short for an 80/20 split");
  const int n_fit = std::clamp(static_cast<int>(std::floor(0.8 * total)), 1, total - 1);

  // Fit on the leading coordinates, score on the rest.
  ExperimentDef fit_experiment = experiment;
  fit_experiment.summary_dim = n_fit;
  for (std::size_t m = 0; m < experiment.models.size(); ++m) {
    const ModelSpec& full = experiment.models[m];
    fit_experiment.models[m].simulator = [full, n_fit](const ParamVector& theta,
                                                       RngStream& noise) {
      SummaryVector y = full.simulator(theta, noise);
      y.values.resize(static_cast<std::size_t>(n_fit));
      return y;
    };
  }
  SummaryVector observed_fit;
  observed_fit.values.assign(observed.values.begin(), observed.values.begin() + n_fit);

  RunConfig short_config = config;
  short_config.n_iters = std::min(config.n_iters, 5);  // reduced search budget

  RngStream search_rng = rng.substream(kTagHyper);
  std::uint64_t pair_index = 0;
  HyperEvaluator evaluate = [&](double s, double delta) {
    RngStream pair_rng = search_rng.substream(pair_index++);
    RunConfig pinned = short_config;
    pinned.hyper_grid.s_values = {s};
    pinned.hyper_grid.delta_values = {delta};
    const TrialResult fit =
        run_kr_abc_fixed(pinned, fit_experiment, observed_fit, s, delta, pair_rng);
    RngStream score_rng = pair_rng.substream(kTagError);
    const SummaryVector y = experiment.models[static_cast<std::size_t>(fit.selected_model)]
                                .simulator(fit.final_state.params[static_cast<std::size_t>(
                                               fit.selected_model)],
                                           score_rng);
    long double acc = 0.0L;
    for (int c = n_fit; c < total; ++c) {
      const long double d = static_cast<long double>(y.values[static_cast<std::size_t>(c)]) -
                            static_cast<long double>(observed.values[static_cast<std::size_t>(c)]);
      acc += d * d;
    }
    return static_cast<double>(std::sqrt(acc));
  };
  return select_hyperparameters(config.hyper_grid, evaluate);
}

MetricsRecord compute_metrics(const std::vector<TrialResult>& trials, int truth_model) {
  if (trials.empty()) throw ConfigError("compute_metrics needs at least one trial");
  MetricsRecord record;
  record.n_trials = static_cast<int>(trials.size());
  int wrong = 0;
  double data_sum = 0.0, extrap_sum = 0.0;
  for (const auto& t : trials) {
    if (t.selected_model != truth_model) ++wrong;
    data_sum += t.data_error;
    extrap_sum += t.extrapolation_error;
  }
  record.model_error = static_cast<double>(wrong) / static_cast<double>(record.n_trials);
  record.mean_data_error = data_sum / static_cast<double>(record.n_trials);
  record.mean_extrapolation_error = extrap_sum / static_cast<double>(record.n_trials);
  return record;
}

double point_data_error(int model, const ParamVector& theta, const SummaryVector& observed,
                        const std::vector<ModelSpec>& models, RngStream& rng) {
  const SummaryVector y = models[static_cast<std::size_t>(model)].simulator(theta, rng);
  if (y.dim() != observed.dim()) {
    throw ConfigError("data_error: simulated and observed dimensions differ");
  }
  return std::sqrt(squared_distance(y.values, observed.values));
}

double data_error(const TrialResult& estimate, const SummaryVector& observed,
                  const std::vector<ModelSpec>& models, RngStream& rng) {
  const int m = estimate.selected_model;
  return point_data_error(m, estimate.final_state.params[static_cast<std::size_t>(m)], observed,
                          models, rng);
}

double extrapolation_error(const TrialResult& estimate, const ExperimentDef& experiment,
                           const SummaryVector& observed_holdout, RngStream& rng) {
  const int m = estimate.selected_model;
  return point_data_error(m, estimate.final_state.params[static_cast<std::size_t>(m)],
                          observed_holdout, experiment.holdout_models, rng);
}

BaselineEstimate run_baseline(const RunConfig& config, const ExperimentDef& experiment,
                              Method method, const SummaryVector& observed, RngStream& rng) {
  BaselineEstimate estimate;
  const int total_budget = config.n_iters * config.n_per_iter;

  if (method == Method::abc_mc) {
    const int n_sims = config.baselines.n_sims > 0 ? config.baselines.n_sims : total_budget;
    RngStream draw_rng = rng.substream(0x3cULL);
    const auto draws = sample_prior_predictive(experiment.models, experiment.priors, n_sims,
                                               draw_rng);
    int knn_k = config.baselines.knn_k;
    if (knn_k <= 0) {
      // Holdout selection over the candidate neighbour counts: fit on the
      // first 80% of coordinates, score a mean-shift estimate on the rest.
      const int total = observed.dim();
      const int n_fit = std::clamp(static_cast<int>(std::floor(0.8 * total)), 1, total - 1);
      std::vector<int> fit_coords(static_cast<std::size_t>(n_fit));
      for (int c = 0; c < n_fit; ++c) fit_coords[static_cast<std::size_t>(c)] = c;
      double best_err = std::numeric_limits<double>::infinity();
      std::uint64_t eval_index = 0;
      for (int cand : config.baselines.knn_candidates) {
        if (cand > n_sims || cand < 1) continue;
        const ModelPosterior post = abc_mc_from_draws(draws, observed, cand, fit_coords);
        const int sel = post.argmax();
        const auto& kept = post.accepted[static_cast<std::size_t>(sel)];
        if (kept.empty()) continue;
        std::vector<std::vector<double>> thetas;
        thetas.reserve(kept.size());
        for (const auto& pr : kept) thetas.push_back(pr.first.theta);
        const double bw = median_heuristic(thetas, 1.0);
        ParamVector theta_hat{mean_shift_mode(thetas, bw), sel};
        RngStream score_rng = rng.substream(0x3c0ULL, eval_index++);
        const SummaryVector y =
            experiment.models[static_cast<std::size_t>(sel)].simulator(theta_hat, score_rng);
        long double acc = 0.0L;
        for (int c = n_fit; c < total; ++c) {
          const long double d =
              static_cast<long double>(y.values[static_cast<std::size_t>(c)]) -
              static_cast<long double>(observed.values[static_cast<std::size_t>(c)]);
          acc += d * d;
        }
        const double err = static_cast<double>(std::sqrt(acc));
        if (err < best_err) {
          best_err = err;
          knn_k = cand;
        }
      }
      if (knn_k <= 0) knn_k = std::min(100, n_sims);
    }
    estimate.knn_k_used = knn_k;
    estimate.posterior = abc_mc_from_draws(draws, observed, knn_k);
    estimate.posterior.probs.resize(experiment.models.size(), 0.0);
    estimate.posterior.accepted.resize(experiment.models.size());
  } else if (method == Method::abc_smc) {
    const int population =
        config.baselines.population > 0 ? config.baselines.population : config.n_per_iter;
    const int generations =
        config.baselines.generations > 0 ? config.baselines.generations : config.n_iters;
    RngStream smc_rng = rng.substream(0x53cULL);
    estimate.posterior = abc_smc_select(observed, experiment.models, experiment.priors, population,
                                        generations, config.baselines.perturb_sd, smc_rng);
  } else {
    throw ConfigError("run_baseline only handles abc-mc and abc-smc");
  }

  estimate.selected_model = estimate.posterior.argmax();
  const auto& kept = estimate.posterior.accepted[static_cast<std::size_t>(estimate.selected_model)];
  if (kept.empty()) {
    // Nothing accepted for the chosen model; fall back to the box centre.
    ParamVector theta;
    theta.model_index = estimate.selected_model;
    for (const Box& b :
         experiment.priors.boxes[static_cast<std::size_t>(estimate.selected_model)]) {
      theta.theta.push_back(0.5 * (b.lo + b.hi));
    }
    estimate.theta_hat = std::move(theta);
    log_warn("run_baseline: no accepted draws for the selected model; using the prior centre");
  } else {
    std::vector<std::vector<double>> thetas;
    thetas.reserve(kept.size());
    for (const auto& pr : kept) thetas.push_back(pr.first.theta);
    const double bw = median_heuristic(thetas, 1.0);
    estimate.theta_hat = ParamVector{mean_shift_mode(thetas, bw), estimate.selected_model};
  }
  return estimate;
}

SummaryVector observed_for_trial(const RunConfig& config, const ExperimentDef& experiment,
                                 int trial) {
  RngStream root(config.seed);
  RngStream obs_rng = root.substream(kTagObserved, static_cast<std::uint64_t>(trial));
  return experiment.sample_observed(obs_rng);
}

SummaryVector observed_holdout_for_trial(const RunConfig& config, const ExperimentDef& experiment,
                                         int trial) {
  RngStream root(config.seed);
  RngStream hold_rng = root.substream(kTagHoldout, static_cast<std::uint64_t>(trial));
  return experiment.sample_observed_holdout(hold_rng);
}

MethodRun run_trials(const RunConfig& config, const ExperimentDef& experiment, Method method) {
  config.validate();
  MethodRun run;
  run.method = method;
  RngStream root(config.seed);
  const std::uint64_t method_tag = kTagMethodBase + static_cast<std::uint64_t>(method);

  std::vector<TrialResult> results;
  results.reserve(static_cast<std::size_t>(config.trials));

  for (int trial = 0; trial < config.trials; ++trial) {
    const auto trial_u = static_cast<std::uint64_t>(trial);
    RngStream obs_rng = root.substream(kTagObserved, trial_u);
    const SummaryVector observed = experiment.sample_observed(obs_rng);
    SummaryVector observed_holdout;
    const bool has_holdout = experiment.holdout_dim > 0;
    if (has_holdout) {
      RngStream hold_rng = root.substream(kTagHoldout, trial_u);
      observed_holdout = experiment.sample_observed_holdout(hold_rng);
    }

    RngStream method_rng = root.substream(method_tag, trial_u);
    TrialResult result;
    if (method == Method::krsel) {
      result = run_kr_abc(config, experiment, observed, method_rng);
    } else {
      const BaselineEstimate estimate =
          run_baseline(config, experiment, method, observed, method_rng);
      result.selected_model = estimate.selected_model;
      result.coefficients = SimplexWeights(estimate.posterior.probs);
      // Package the baseline estimate as a degenerate mixture state so the
      // error metrics run through the same code path.
      std::vector<ParamVector> params;
      for (std::size_t m = 0; m < experiment.models.size(); ++m) {
        if (static_cast<int>(m) == estimate.selected_model) {
          params.push_back(estimate.theta_hat);
        } else {
          ParamVector filler;
          filler.model_index = static_cast<int>(m);
          filler.theta.assign(static_cast<std::size_t>(experiment.models[m].dim), 0.0);
          params.push_back(std::move(filler));
        }
      }
      result.final_state = MixtureState{result.coefficients, std::move(params)};
    }

    RngStream err_rng = root.substream(kTagError, trial_u, static_cast<std::uint64_t>(method));
    result.data_error = data_error(result, observed, experiment.models, err_rng);
    if (has_holdout) {
      RngStream extrap_rng =
          root.substream(kTagError + 1, trial_u, static_cast<std::uint64_t>(method));
      result.extrapolation_error =
          extrapolation_error(result, experiment, observed_holdout, extrap_rng);
    } else {
      result.extrapolation_error = std::numeric_limits<double>::quiet_NaN();
    }

    TrialRow row;
    row.seed = obs_rng.seed();
    row.selected_model = result.selected_model;
    row.coefficients = result.coefficients.values();
    row.data_error = result.data_error;
    row.extrapolation_error = result.extrapolation_error;
    run.rows.push_back(std::move(row));
    if (method == Method::krsel) {
      std::vector<std::vector<double>> trajectory;
      trajectory.reserve(result.per_iteration_log.size());
      for (const auto& state : result.per_iteration_log) {
        trajectory.push_back(state.weights.values());
      }
      run.trajectories.push_back(std::move(trajectory));
    }
    results.push_back(std::move(result));
  }

  run.metrics = compute_metrics(results, experiment.truth_model);
  return run;
}

}  // namespace krsel

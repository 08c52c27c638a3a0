#pragma once

#include <utility>
#include <vector>

#include "krsel/simulators.hpp"
#include "krsel/state.hpp"

namespace krsel {

// Posterior over candidate models plus the accepted (parameter, summary)
// pairs per model that produced it.
struct ModelPosterior {
  std::vector<double> probs;
  std::vector<std::vector<std::pair<ParamVector, SummaryVector>>> accepted;

  int argmax() const;  // ties to the lowest index
};

// Bayes-factor-style ratio of acceptance counts with +0.5 Laplace smoothing.
// Only for reporting; selection always uses the raw frequencies.
double smoothed_bayes_factor(const ModelPosterior& posterior, int numerator_model,
                             int denominator_model);

struct PriorPredictiveDraw {
  int model = 0;
  ParamVector theta;
  SummaryVector y;
};

// n_sims triples (m ~ uniform, theta ~ prior_m, y ~ P_m). Draw t consumes
// substream t of the given stream.
std::vector<PriorPredictiveDraw> sample_prior_predictive(const std::vector<ModelSpec>& models,
                                                         const PriorSpec& priors, int n_sims,
                                                         RngStream& rng);

// kNN post-processing of prior-predictive draws: keep the knn_k draws whose
// summaries are nearest to the observed one (Euclidean over coord_subset, or
// all coordinates when empty) and report class frequencies among them.
ModelPosterior abc_mc_from_draws(const std::vector<PriorPredictiveDraw>& draws,
                                 const SummaryVector& observed, int knn_k,
                                 const std::vector<int>& coord_subset = {});

ModelPosterior abc_mc_select(const SummaryVector& observed, const std::vector<ModelSpec>& models,
                             const PriorSpec& priors, int n_sims, int knn_k, RngStream& rng);

struct SmcDiagnostics {
  std::vector<double> epsilons;       // tolerance per generation
  std::vector<long> simulations;      // simulator calls per generation
  int relaxations = 0;
};

// Sequential Monte Carlo over (model index, parameters): generation 0 is
// rejection sampling from the prior at the median distance of an initial
// batch; later generations resample by importance weight, perturb the model
// index (stay with probability 0.75) and the parameters (Gaussian), and
// tighten the tolerance to the median of the previous accepted distances.
ModelPosterior abc_smc_select(const SummaryVector& observed, const std::vector<ModelSpec>& models,
                              const PriorSpec& priors, int population, int generations,
                              double perturb_sd, RngStream& rng,
                              SmcDiagnostics* diagnostics = nullptr);

// Gaussian-kernel mean shift started from every sample; returns the
// converged point with the highest kernel density estimate.
std::vector<double> mean_shift_mode(const std::vector<std::vector<double>>& samples,
                                    double bandwidth);

}  // namespace krsel

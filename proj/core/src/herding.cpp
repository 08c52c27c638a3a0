#include "krsel/herding.hpp"

#include <algorithm>
#include <cmath>

#include "krsel/errors.hpp"

namespace krsel {

namespace {

constexpr double kPhiFloor = 1e-12;  // floor before taking log of simplex coords
constexpr double kStdFloor = 1e-6;   // floor on perturbation standard deviations

struct PerturbationScales {
  std::vector<double> log_phi_sd;               // size K
  std::vector<std::vector<double>> theta_sd;    // per model, per coordinate
};

PerturbationScales perturbation_scales(const ParticleEnsemble& ensemble, double scale) {
  const auto& states = ensemble.states;
  const std::size_t n = states.size();
  const StateLayout layout = layout_of(states.front());

  PerturbationScales out;
  out.log_phi_sd.resize(static_cast<std::size_t>(layout.k));
  for (int m = 0; m < layout.k; ++m) {
    double mean = 0.0, sq = 0.0;
    for (const auto& s : states) {
      const double v = std::log(std::max(s.weights[m], kPhiFloor));
      mean += v;
      sq += v * v;
    }
    mean /= static_cast<double>(n);
    const double var = std::max(sq / static_cast<double>(n) - mean * mean, 0.0);
    out.log_phi_sd[static_cast<std::size_t>(m)] = std::max(scale * std::sqrt(var), kStdFloor);
  }

  out.theta_sd.resize(layout.dims.size());
  for (std::size_t m = 0; m < layout.dims.size(); ++m) {
    out.theta_sd[m].resize(static_cast<std::size_t>(layout.dims[m]));
    for (int j = 0; j < layout.dims[m]; ++j) {
      double mean = 0.0, sq = 0.0;
      for (const auto& s : states) {
        const double v = s.params[m].theta[static_cast<std::size_t>(j)];
        mean += v;
        sq += v * v;
      }
      mean /= static_cast<double>(n);
      const double var = std::max(sq / static_cast<double>(n) - mean * mean, 0.0);
      out.theta_sd[m][static_cast<std::size_t>(j)] = std::max(scale * std::sqrt(var), kStdFloor);
    }
  }
  return out;
}

// Additive Gaussian noise on log(phi) keeps the simplex exact after
// renormalization and keeps near-vertex states reachable.
SimplexWeights perturb_weights(const SimplexWeights& base, const PerturbationScales& scales,
                               RngStream& rng) {
  const int k = base.size();
  std::vector<double> logs(static_cast<std::size_t>(k));
  double max_log = -std::numeric_limits<double>::infinity();
  for (int m = 0; m < k; ++m) {
    logs[static_cast<std::size_t>(m)] = std::log(std::max(base[m], kPhiFloor)) +
                                        rng.normal() * scales.log_phi_sd[static_cast<std::size_t>(m)];
    max_log = std::max(max_log, logs[static_cast<std::size_t>(m)]);
  }
  std::vector<double> phi(static_cast<std::size_t>(k));
  double sum = 0.0;
  for (int m = 0; m < k; ++m) {
    phi[static_cast<std::size_t>(m)] = std::exp(logs[static_cast<std::size_t>(m)] - max_log);
    sum += phi[static_cast<std::size_t>(m)];
  }
  for (auto& p : phi) p /= sum;
  return SimplexWeights(std::move(phi));
}

MixtureState perturb_state(const MixtureState& base, const PerturbationScales& scales,
                           const std::vector<std::uint8_t>& nonneg_mask, RngStream& rng) {
  SimplexWeights weights = perturb_weights(base.weights, scales, rng);
  std::vector<ParamVector> params = base.params;
  std::size_t flat_j = 0;
  for (std::size_t m = 0; m < params.size(); ++m) {
    for (std::size_t j = 0; j < params[m].theta.size(); ++j, ++flat_j) {
      double v = params[m].theta[j] + rng.normal() * scales.theta_sd[m][j];
      if (!nonneg_mask.empty() && nonneg_mask[flat_j]) v = std::max(v, 0.0);
      params[m].theta[j] = v;
    }
  }
  return MixtureState{std::move(weights), std::move(params)};
}

}  // namespace

void HerdingConfig::validate(const StateLayout& layout) const {
  if (pool_multiplier < 1) throw ConfigError("pool_multiplier must be >= 1");
  if (!(perturbation_scale > 0.0) || !std::isfinite(perturbation_scale)) {
    throw ConfigError("perturbation_scale must be positive and finite");
  }
  if (!(fresh_prior_fraction >= 0.0 && fresh_prior_fraction <= 1.0)) {
    throw ConfigError("fresh_prior_fraction must lie in [0, 1]");
  }
  const int param_dim = layout.flat_dim() - layout.k;
  if (!nonneg_mask.empty() && static_cast<int>(nonneg_mask.size()) != param_dim) {
    throw ConfigError("nonneg_mask length must equal the total parameter dimension");
  }
  if (prior) {
    prior->validate();
    if (prior->layout() != layout) {
      throw ConfigError("herding prior layout does not match the embedding");
    }
  }
}

double herding_objective(const MixtureState& candidate, const PosteriorEmbedding& embedding,
                         const std::vector<MixtureState>& selected,
                         const ProductStateKernelSpec& kernel) {
  const auto& particles = embedding.particles.states;
  if (particles.empty() || embedding.weights.size() != particles.size()) {
    throw ConfigError("herding_objective: malformed embedding");
  }
  kernel.validate();
  if (candidate.n_models() != particles.front().n_models() ||
      static_cast<int>(kernel.param_bandwidths.size()) != candidate.n_models()) {
    throw ConfigError("herding_objective: model count mismatch");
  }
  double attraction = 0.0;
  for (std::size_t i = 0; i < particles.size(); ++i) {
    attraction += embedding.weights[i] * state_kernel_eval_unchecked(candidate, particles[i], kernel);
  }
  double repulsion = 0.0;
  for (const auto& s : selected) {
    repulsion += state_kernel_eval_unchecked(candidate, s, kernel);
  }
  return attraction - repulsion / (static_cast<double>(selected.size()) + 1.0);
}

ParticleEnsemble herd_sample(const PosteriorEmbedding& embedding, int n_out,
                             const ProductStateKernelSpec& kernel, const HerdingConfig& config,
                             RngStream& rng) {
  const int n = embedding.size();
  if (n < 1) throw ConfigError("herd_sample: empty embedding");
  if (static_cast<int>(embedding.weights.size()) != n) {
    throw ConfigError("herd_sample: weight/particle count mismatch");
  }
  if (n_out < 1) throw ConfigError("herd_sample: n_out must be >= 1");
  const StateLayout layout = layout_of(embedding.particles.states.front());
  config.validate(layout);
  kernel.validate();

  const int pool_size = config.pool_multiplier * n;
  int n_fresh = config.prior
                    ? static_cast<int>(std::lround(config.fresh_prior_fraction * pool_size))
                    : 0;
  n_fresh = std::min(n_fresh, pool_size - n);
  const int n_perturbed = pool_size - n - n_fresh;

  const PerturbationScales scales =
      perturbation_scales(embedding.particles, config.perturbation_scale);

  std::vector<MixtureState> selected;
  selected.reserve(static_cast<std::size_t>(n_out));

  std::vector<MixtureState> extras;  // perturbed + fresh candidates, rebuilt per step
  extras.reserve(static_cast<std::size_t>(n_perturbed + n_fresh));

  for (int t = 0; t < n_out; ++t) {
    RngStream step_rng = rng.substream(static_cast<std::uint64_t>(t));
    extras.clear();
    for (int j = 0; j < n_perturbed; ++j) {
      const auto& base = embedding.particles.states[static_cast<std::size_t>(j % n)];
      extras.push_back(perturb_state(base, scales, config.nonneg_mask, step_rng));
    }
    for (int j = 0; j < n_fresh; ++j) {
      extras.push_back(sample_state_from_prior(*config.prior, step_rng));
    }

    // Yields the pool candidate at index c: particles first, extras after.
    auto candidate_at = [&](int c) -> const MixtureState& {
      return c < n ? embedding.particles.states[static_cast<std::size_t>(c)]
                   : extras[static_cast<std::size_t>(c - n)];
    };

    // Objective values land in per-candidate slots; the argmax scan below is
    // sequential, so parallel evaluation cannot change the selection.
    const int total = n + static_cast<int>(extras.size());
    std::vector<double> objective(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
    for (int c = 0; c < total; ++c) {
      objective[static_cast<std::size_t>(c)] =
          herding_objective(candidate_at(c), embedding, selected, kernel);
    }
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < total; ++c) {
      if (objective[static_cast<std::size_t>(c)] > best_value) {  // ties keep the lowest index
        best_value = objective[static_cast<std::size_t>(c)];
        best = c;
      }
    }
    selected.push_back(candidate_at(best));
  }

  ParticleEnsemble out;
  out.states = std::move(selected);
  out.recursion_index = embedding.particles.recursion_index + 1;
  return out;
}

double mmd_to_embedding(const std::vector<MixtureState>& points,
                        const PosteriorEmbedding& embedding,
                        const ProductStateKernelSpec& kernel) {
  if (points.empty()) throw ConfigError("mmd_to_embedding: empty point set");
  kernel.validate();
  const auto& particles = embedding.particles.states;
  const auto& w = embedding.weights;
  const double t = static_cast<double>(points.size());

  double mu_sq = 0.0;
  for (std::size_t i = 0; i < particles.size(); ++i) {
    for (std::size_t j = 0; j < particles.size(); ++j) {
      mu_sq += w[i] * w[j] * state_kernel_eval_unchecked(particles[i], particles[j], kernel);
    }
  }
  double cross = 0.0;
  for (std::size_t i = 0; i < particles.size(); ++i) {
    for (const auto& p : points) {
      cross += w[i] * state_kernel_eval_unchecked(particles[i], p, kernel);
    }
  }
  cross /= t;
  double avg_sq = 0.0;
  for (const auto& a : points) {
    for (const auto& b : points) {
      avg_sq += state_kernel_eval_unchecked(a, b, kernel);
    }
  }
  avg_sq /= t * t;

  return std::sqrt(std::max(mu_sq - 2.0 * cross + avg_sq, 0.0));
}

}  // namespace krsel

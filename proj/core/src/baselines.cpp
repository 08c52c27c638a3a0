#include "krsel/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "krsel/errors.hpp"
#include "krsel/kernels.hpp"
#include "krsel/log.hpp"

namespace krsel {

namespace {

double subset_distance(const std::vector<double>& a, const std::vector<double>& b,
                       const std::vector<int>& coord_subset) {
  if (coord_subset.empty()) {
    return std::sqrt(squared_distance(a, b));
  }
  long double acc = 0.0L;
  for (int c : coord_subset) {
    const long double d = static_cast<long double>(a[static_cast<std::size_t>(c)]) -
                          static_cast<long double>(b[static_cast<std::size_t>(c)]);
    acc += d * d;
  }
  return std::sqrt(static_cast<double>(acc));
}

bool inside_box(const ParamVector& theta, const std::vector<Box>& boxes) {
  for (std::size_t j = 0; j < theta.theta.size(); ++j) {
    if (theta.theta[j] < boxes[j].lo || theta.theta[j] > boxes[j].hi) return false;
  }
  return true;
}

}  // namespace

int ModelPosterior::argmax() const {
  int best = 0;
  for (int m = 1; m < static_cast<int>(probs.size()); ++m) {
    if (probs[static_cast<std::size_t>(m)] > probs[static_cast<std::size_t>(best)]) best = m;
  }
  return best;
}

double smoothed_bayes_factor(const ModelPosterior& posterior, int numerator_model,
                             int denominator_model) {
  const double a =
      static_cast<double>(posterior.accepted[static_cast<std::size_t>(numerator_model)].size());
  const double b =
      static_cast<double>(posterior.accepted[static_cast<std::size_t>(denominator_model)].size());
  return (a + 0.5) / (b + 0.5);
}

std::vector<PriorPredictiveDraw> sample_prior_predictive(const std::vector<ModelSpec>& models,
                                                         const PriorSpec& priors, int n_sims,
                                                         RngStream& rng) {
  priors.validate();
  if (models.size() != priors.boxes.size()) {
    throw ConfigError("model/prior count mismatch in prior predictive sampling");
  }
  if (n_sims < 1) throw ConfigError("n_sims must be >= 1");
  const int k = static_cast<int>(models.size());

  std::vector<PriorPredictiveDraw> draws(static_cast<std::size_t>(n_sims));
  for (int t = 0; t < n_sims; ++t) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(t));
    PriorPredictiveDraw& d = draws[static_cast<std::size_t>(t)];
    d.model = static_cast<int>(sub.engine()() % static_cast<std::uint64_t>(k));
    d.theta.model_index = d.model;
    const auto& boxes = priors.boxes[static_cast<std::size_t>(d.model)];
    d.theta.theta.reserve(boxes.size());
    for (const Box& b : boxes) d.theta.theta.push_back(sub.uniform(b.lo, b.hi));
    d.y = models[static_cast<std::size_t>(d.model)].simulator(d.theta, sub);
  }
  return draws;
}

ModelPosterior abc_mc_from_draws(const std::vector<PriorPredictiveDraw>& draws,
                                 const SummaryVector& observed, int knn_k,
                                 const std::vector<int>& coord_subset) {
  const int n = static_cast<int>(draws.size());
  if (knn_k < 1 || knn_k > n) throw ConfigError("knn_k must be within [1, n_sims]");
  int k = 0;
  for (const auto& d : draws) k = std::max(k, d.model + 1);

  std::vector<std::pair<double, int>> order(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    order[static_cast<std::size_t>(t)] = {
        subset_distance(draws[static_cast<std::size_t>(t)].y.values, observed.values,
                        coord_subset),
        t};
  }
  std::partial_sort(order.begin(), order.begin() + knn_k, order.end());

  ModelPosterior posterior;
  posterior.probs.assign(static_cast<std::size_t>(k), 0.0);
  posterior.accepted.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < knn_k; ++i) {
    const auto& d = draws[static_cast<std::size_t>(order[static_cast<std::size_t>(i)].second)];
    posterior.probs[static_cast<std::size_t>(d.model)] += 1.0;
    posterior.accepted[static_cast<std::size_t>(d.model)].emplace_back(d.theta, d.y);
  }
  for (double& p : posterior.probs) p /= static_cast<double>(knn_k);
  return posterior;
}

ModelPosterior abc_mc_select(const SummaryVector& observed, const std::vector<ModelSpec>& models,
                             const PriorSpec& priors, int n_sims, int knn_k, RngStream& rng) {
  const auto draws = sample_prior_predictive(models, priors, n_sims, rng);
  auto posterior = abc_mc_from_draws(draws, observed, knn_k);
  // All models must appear even if no draw hit them.
  const std::size_t k = models.size();
  posterior.probs.resize(k, 0.0);
  posterior.accepted.resize(k);
  return posterior;
}

namespace {

struct SmcParticle {
  int model = 0;
  ParamVector theta;
  double weight = 0.0;
  double dist = 0.0;
};

double gaussian_transition_density(const ParamVector& to, const ParamVector& from, double sd) {
  const double norm = 1.0 / (std::sqrt(2.0 * M_PI) * sd);
  double dens = 1.0;
  for (std::size_t j = 0; j < to.theta.size(); ++j) {
    const double d = to.theta[j] - from.theta[j];
    dens *= norm * std::exp(-d * d / (2.0 * sd * sd));
  }
  return dens;
}

}  // namespace

ModelPosterior abc_smc_select(const SummaryVector& observed, const std::vector<ModelSpec>& models,
                              const PriorSpec& priors, int population, int generations,
                              double perturb_sd, RngStream& rng, SmcDiagnostics* diagnostics) {
  priors.validate();
  if (population < 1) throw ConfigError("SMC population must be >= 1");
  if (generations < 1) throw ConfigError("SMC generations must be >= 1");
  if (!(perturb_sd > 0.0)) throw ConfigError("SMC perturbation sd must be positive");
  const int k = static_cast<int>(models.size());
  const double stay_prob = 0.75;

  auto draw_prior = [&](RngStream& stream) {
    SmcParticle p;
    p.model = static_cast<int>(stream.engine()() % static_cast<std::uint64_t>(k));
    p.theta.model_index = p.model;
    for (const Box& b : priors.boxes[static_cast<std::size_t>(p.model)]) {
      p.theta.theta.push_back(stream.uniform(b.lo, b.hi));
    }
    return p;
  };
  auto prior_theta_density = [&](const SmcParticle& p) {
    double dens = 1.0;
    for (const Box& b : priors.boxes[static_cast<std::size_t>(p.model)]) {
      dens /= (b.hi - b.lo);
    }
    return dens;
  };

  // Initial batch fixes the starting tolerance.
  std::uint64_t sim_counter = 0;
  std::vector<double> batch_dists;
  batch_dists.reserve(static_cast<std::size_t>(population));
  for (int i = 0; i < population; ++i) {
    RngStream sub = rng.substream(0xbeefULL, sim_counter++);
    SmcParticle p = draw_prior(sub);
    const SummaryVector y = models[static_cast<std::size_t>(p.model)].simulator(p.theta, sub);
    batch_dists.push_back(std::sqrt(squared_distance(y.values, observed.values)));
  }
  std::sort(batch_dists.begin(), batch_dists.end());
  const std::size_t mb = batch_dists.size();
  double epsilon = (mb % 2 == 1) ? batch_dists[mb / 2]
                                 : 0.5 * (batch_dists[mb / 2 - 1] + batch_dists[mb / 2]);

  std::vector<SmcParticle> prev;
  const long max_attempts = 50L * population;

  for (int g = 0; g < generations; ++g) {
    std::vector<SmcParticle> current;
    current.reserve(static_cast<std::size_t>(population));
    long gen_sims = 0;
    int relaxations = 0;
    long attempts_since_accept = 0;

    // Per-model weight totals of the previous generation, for proposals and
    // for the weight denominators.
    std::vector<double> model_weight(static_cast<std::size_t>(k), 0.0);
    for (const auto& p : prev) model_weight[static_cast<std::size_t>(p.model)] += p.weight;
    std::vector<double> prev_weights(prev.size());
    for (std::size_t i = 0; i < prev.size(); ++i) prev_weights[i] = prev[i].weight;

    while (static_cast<int>(current.size()) < population) {
      if (attempts_since_accept >= max_attempts) {
        if (relaxations >= 5) {
          throw NumericalError("abc_smc_select: generation " + std::to_string(g) +
                               " stalled at epsilon=" + std::to_string(epsilon) +
                               " after 5 relaxations");
        }
        epsilon *= 1.5;
        ++relaxations;
        attempts_since_accept = 0;
        log_warn("abc_smc_select: relaxing tolerance to " + std::to_string(epsilon) +
                 " in generation " + std::to_string(g));
      }
      RngStream sub = rng.substream(static_cast<std::uint64_t>(g) + 1, sim_counter++);
      ++attempts_since_accept;

      SmcParticle proposal;
      bool theta_from_prior = false;
      if (g == 0) {
        proposal = draw_prior(sub);
        theta_from_prior = true;
      } else {
        const auto& ancestor = prev[static_cast<std::size_t>(sub.categorical(prev_weights))];
        int m = ancestor.model;
        if (k > 1 && sub.uniform() >= stay_prob) {
          const int other = static_cast<int>(sub.engine()() % static_cast<std::uint64_t>(k - 1));
          m = other >= m ? other + 1 : other;
        }
        proposal.model = m;
        proposal.theta.model_index = m;
        if (m == ancestor.model) {
          proposal.theta.theta = ancestor.theta.theta;
        } else if (model_weight[static_cast<std::size_t>(m)] > 0.0) {
          // Model switch: restart from a previous particle of the target model.
          std::vector<double> wm;
          std::vector<std::size_t> idx;
          for (std::size_t i = 0; i < prev.size(); ++i) {
            if (prev[i].model == m) {
              wm.push_back(prev[i].weight);
              idx.push_back(i);
            }
          }
          proposal.theta.theta =
              prev[idx[static_cast<std::size_t>(sub.categorical(wm))]].theta.theta;
        } else {
          // Target model died out; fall back to its prior.
          for (const Box& b : priors.boxes[static_cast<std::size_t>(m)]) {
            proposal.theta.theta.push_back(sub.uniform(b.lo, b.hi));
          }
          theta_from_prior = true;
        }
        if (!theta_from_prior) {
          for (double& v : proposal.theta.theta) v += perturb_sd * sub.normal();
        }
        if (!inside_box(proposal.theta, priors.boxes[static_cast<std::size_t>(m)])) {
          continue;  // zero prior density
        }
      }

      const SummaryVector y =
          models[static_cast<std::size_t>(proposal.model)].simulator(proposal.theta, sub);
      ++gen_sims;
      proposal.dist = std::sqrt(squared_distance(y.values, observed.values));
      // Non-strict comparison: a tolerance that collapses onto the attained
      // minimum distance (e.g. an exactly matching simulator) must still
      // accept, or the sampler deadlocks.
      if (proposal.dist > epsilon) continue;

      if (g == 0) {
        proposal.weight = 1.0;
      } else {
        double model_mix = 0.0;
        for (const auto& q : prev) {
          const double km = (q.model == proposal.model)
                                ? stay_prob
                                : (1.0 - stay_prob) / static_cast<double>(k - 1);
          model_mix += q.weight * km;
        }
        double theta_dens;
        if (theta_from_prior || model_weight[static_cast<std::size_t>(proposal.model)] <= 0.0) {
          theta_dens = prior_theta_density(proposal);
        } else {
          theta_dens = 0.0;
          for (const auto& q : prev) {
            if (q.model != proposal.model) continue;
            theta_dens += (q.weight / model_weight[static_cast<std::size_t>(proposal.model)]) *
                          gaussian_transition_density(proposal.theta, q.theta, perturb_sd);
          }
        }
        const double numerator = (1.0 / static_cast<double>(k)) * prior_theta_density(proposal);
        proposal.weight = numerator / std::max(model_mix * theta_dens, 1e-300);
      }
      current.push_back(std::move(proposal));
      attempts_since_accept = 0;
    }

    double wsum = 0.0;
    for (const auto& p : current) wsum += p.weight;
    for (auto& p : current) p.weight /= wsum;

    if (diagnostics) {
      diagnostics->epsilons.push_back(epsilon);
      diagnostics->simulations.push_back(gen_sims);
      diagnostics->relaxations += relaxations;
    }

    // Next tolerance: median of this generation's accepted distances.
    std::vector<double> dists(current.size());
    for (std::size_t i = 0; i < current.size(); ++i) dists[i] = current[i].dist;
    std::sort(dists.begin(), dists.end());
    const std::size_t md = dists.size();
    epsilon = (md % 2 == 1) ? dists[md / 2] : 0.5 * (dists[md / 2 - 1] + dists[md / 2]);

    prev = std::move(current);
  }

  ModelPosterior posterior;
  posterior.probs.assign(static_cast<std::size_t>(k), 0.0);
  posterior.accepted.resize(static_cast<std::size_t>(k));
  for (const auto& p : prev) {
    posterior.probs[static_cast<std::size_t>(p.model)] += 1.0;
    // Accepted summaries are not kept per particle; parameter pairs suffice
    // for mean-shift estimation downstream.
    posterior.accepted[static_cast<std::size_t>(p.model)].emplace_back(p.theta, SummaryVector{});
  }
  for (double& p : posterior.probs) p /= static_cast<double>(population);
  return posterior;
}

std::vector<double> mean_shift_mode(const std::vector<std::vector<double>>& samples,
                                    double bandwidth) {
  if (samples.empty()) throw ConfigError("mean_shift_mode: empty sample set");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw ConfigError("mean_shift_mode: bandwidth must be positive");
  }
  const std::size_t dim = samples.front().size();
  const double bw2 = bandwidth * bandwidth;

  auto density = [&](const std::vector<double>& x) {
    double dens = 0.0;
    for (const auto& s : samples) dens += std::exp(-squared_distance(x, s) / bw2);
    return dens;
  };

  std::vector<double> best;
  double best_density = -1.0;
  std::vector<double> x, next(dim);
  for (const auto& start : samples) {
    x = start;
    for (int iter = 0; iter < 500; ++iter) {
      std::fill(next.begin(), next.end(), 0.0);
      double total = 0.0;
      for (const auto& s : samples) {
        const double w = std::exp(-squared_distance(x, s) / bw2);
        total += w;
        for (std::size_t j = 0; j < dim; ++j) next[j] += w * s[j];
      }
      if (total <= 0.0) break;  // isolated start, stay put
      for (std::size_t j = 0; j < dim; ++j) next[j] /= total;
      const double shift = std::sqrt(squared_distance(next, x));
      x = next;
      if (shift < 1e-6) break;
    }
    const double dens = density(x);
    if (dens > best_density) {
      best_density = dens;
      best = x;
    }
  }
  return best;
}

}  // namespace krsel

#include "krsel/state.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "krsel/errors.hpp"

namespace krsel {

namespace {
constexpr double kSumSlack = 1e-6;  // beyond this the caller has a bug
}

SimplexWeights::SimplexWeights(std::vector<double> phi) : phi_(std::move(phi)) {
  if (phi_.empty()) throw ConfigError("simplex weights must have at least one component");
  double sum = 0.0;
  for (double p : phi_) {
    if (!std::isfinite(p)) throw ConfigError("simplex weight is not finite");
    if (p < 0.0) throw ConfigError("simplex weight is negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumSlack) {
    throw ConfigError("simplex weights sum to " + std::to_string(sum) + ", expected 1");
  }
  for (double& p : phi_) p /= sum;
}

int SimplexWeights::argmax() const {
  int best = 0;
  for (int m = 1; m < size(); ++m) {
    if (phi_[static_cast<std::size_t>(m)] > phi_[static_cast<std::size_t>(best)]) best = m;
  }
  return best;
}

int StateLayout::flat_dim() const {
  return k + std::accumulate(dims.begin(), dims.end(), 0);
}

StateLayout layout_of(const MixtureState& state) {
  StateLayout layout;
  layout.k = state.weights.size();
  layout.dims.reserve(state.params.size());
  for (const auto& p : state.params) layout.dims.push_back(p.dim());
  return layout;
}

StateLayout PriorSpec::layout() const {
  StateLayout l;
  l.k = n_models();
  l.dims.reserve(boxes.size());
  for (const auto& b : boxes) l.dims.push_back(static_cast<int>(b.size()));
  return l;
}

void PriorSpec::validate() const {
  if (!(dirichlet_alpha > 0.0) || !std::isfinite(dirichlet_alpha)) {
    throw ConfigError("dirichlet_alpha must be positive and finite");
  }
  if (boxes.empty()) throw ConfigError("prior needs at least one model");
  for (const auto& model_boxes : boxes) {
    if (model_boxes.empty()) throw ConfigError("prior box list is empty for a model");
    for (const auto& b : model_boxes) {
      if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi)) {
        throw ConfigError("prior box requires finite lower < upper");
      }
    }
  }
}

MixtureState sample_state_from_prior(const PriorSpec& prior, RngStream& rng) {
  const int k = prior.n_models();
  SimplexWeights weights(sample_symmetric_dirichlet(prior.dirichlet_alpha, k, rng));
  std::vector<ParamVector> params;
  params.reserve(static_cast<std::size_t>(k));
  for (int m = 0; m < k; ++m) {
    ParamVector pv;
    pv.model_index = m;
    pv.theta.reserve(prior.boxes[static_cast<std::size_t>(m)].size());
    for (const Box& b : prior.boxes[static_cast<std::size_t>(m)]) {
      pv.theta.push_back(rng.uniform(b.lo, b.hi));
    }
    params.push_back(std::move(pv));
  }
  return MixtureState{std::move(weights), std::move(params)};
}

ParticleEnsemble sample_initial_ensemble(const PriorSpec& prior, int n, RngStream& rng) {
  prior.validate();
  if (n < 1) throw ConfigError("ensemble size must be >= 1");
  ParticleEnsemble ensemble;
  ensemble.recursion_index = 1;
  ensemble.states.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(i));
    ensemble.states.push_back(sample_state_from_prior(prior, sub));
  }
  return ensemble;
}

std::vector<double> flatten(const MixtureState& state) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(layout_of(state).flat_dim()));
  flat.insert(flat.end(), state.weights.values().begin(), state.weights.values().end());
  for (const auto& p : state.params) {
    flat.insert(flat.end(), p.theta.begin(), p.theta.end());
  }
  return flat;
}

MixtureState unflatten(std::span<const double> flat, const StateLayout& layout) {
  if (static_cast<int>(flat.size()) != layout.flat_dim()) {
    throw ConfigError("flat vector length does not match the state layout");
  }
  std::vector<double> phi(flat.begin(), flat.begin() + layout.k);
  std::vector<ParamVector> params;
  params.reserve(layout.dims.size());
  std::size_t offset = static_cast<std::size_t>(layout.k);
  for (int m = 0; m < static_cast<int>(layout.dims.size()); ++m) {
    const auto d = static_cast<std::size_t>(layout.dims[static_cast<std::size_t>(m)]);
    ParamVector pv;
    pv.model_index = m;
    pv.theta.assign(flat.begin() + static_cast<std::ptrdiff_t>(offset),
                    flat.begin() + static_cast<std::ptrdiff_t>(offset + d));
    params.push_back(std::move(pv));
    offset += d;
  }
  return MixtureState{SimplexWeights(std::move(phi)), std::move(params)};
}

std::vector<std::string> flat_coordinate_names(const StateLayout& layout) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(layout.flat_dim()));
  for (int m = 0; m < layout.k; ++m) names.push_back("phi" + std::to_string(m));
  for (std::size_t m = 0; m < layout.dims.size(); ++m) {
    for (int j = 0; j < layout.dims[m]; ++j) {
      names.push_back("theta" + std::to_string(m) + "_" + std::to_string(j));
    }
  }
  return names;
}

}  // namespace krsel

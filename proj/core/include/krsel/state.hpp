#pragma once

#include <span>
#include <vector>

#include "krsel/rng.hpp"

namespace krsel {

// Mixing coefficients on the (K-1)-simplex. Renormalized on construction;
// deviations of the input sum from 1 beyond 1e-6 are treated as logic bugs.
class SimplexWeights {
public:
  SimplexWeights() : phi_{1.0} {}  // degenerate one-model simplex
  explicit SimplexWeights(std::vector<double> phi);

  const std::vector<double>& values() const { return phi_; }
  int size() const { return static_cast<int>(phi_.size()); }
  double operator[](int m) const { return phi_[static_cast<std::size_t>(m)]; }

  // Largest coefficient, ties resolved to the lowest index.
  int argmax() const;

private:
  std::vector<double> phi_;
};

struct ParamVector {
  std::vector<double> theta;
  int model_index = 0;

  int dim() const { return static_cast<int>(theta.size()); }
};

// One point of the product space: simplex weights over K candidate models
// plus one parameter vector per model.
struct MixtureState {
  SimplexWeights weights;
  std::vector<ParamVector> params;

  int n_models() const { return weights.size(); }
};

// Shape of a state space: K and the per-model parameter dimensions.
struct StateLayout {
  int k = 0;
  std::vector<int> dims;

  int flat_dim() const;
  bool operator==(const StateLayout&) const = default;
};

StateLayout layout_of(const MixtureState& state);

struct Box {
  double lo = 0.0;
  double hi = 0.0;
};

// Dirichlet concentration for the simplex plus an independent uniform box
// prior per parameter coordinate.
struct PriorSpec {
  double dirichlet_alpha = 0.01;
  std::vector<std::vector<Box>> boxes;  // boxes[m][j] bounds coordinate j of model m

  int n_models() const { return static_cast<int>(boxes.size()); }
  int dim(int m) const { return static_cast<int>(boxes[static_cast<std::size_t>(m)].size()); }
  StateLayout layout() const;
  void validate() const;  // throws ConfigError
};

struct ParticleEnsemble {
  std::vector<MixtureState> states;
  int recursion_index = 1;

  int size() const { return static_cast<int>(states.size()); }
};

// n i.i.d. draws from the initial prior: weights ~ Dirichlet(alpha), each
// parameter coordinate uniform over its box. Particle i consumes substream i
// of the given stream, so parallel drivers get the same ensemble.
ParticleEnsemble sample_initial_ensemble(const PriorSpec& prior, int n, RngStream& rng);

MixtureState sample_state_from_prior(const PriorSpec& prior, RngStream& rng);

// Concatenation [phi_1..phi_K, theta^1, ..., theta^K]; inverse of unflatten.
std::vector<double> flatten(const MixtureState& state);
MixtureState unflatten(std::span<const double> flat, const StateLayout& layout);

// Column labels matching flatten() order: phi0.., theta<m>_<j>..
std::vector<std::string> flat_coordinate_names(const StateLayout& layout);

}  // namespace krsel

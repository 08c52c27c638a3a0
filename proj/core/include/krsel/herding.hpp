#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "krsel/kernel_bayes.hpp"
#include "krsel/kernels.hpp"
#include "krsel/rng.hpp"
#include "krsel/state.hpp"

namespace krsel {

// Candidate-pool strategy for the herding argmax. Per output point the pool
// is: the embedding's particles, Gaussian-perturbed copies of them, and a
// slice of fresh prior draws (when a prior is supplied). Pool size is
// pool_multiplier * n. Parameter coordinates are never clipped to the prior
// boxes; only nonneg-masked coordinates are clamped at zero.
struct HerdingConfig {
  int pool_multiplier = 10;
  double perturbation_scale = 0.5;     // fraction of per-coordinate particle std
  double fresh_prior_fraction = 0.1;   // share of the pool drawn fresh from the prior
  std::vector<std::uint8_t> nonneg_mask;  // concatenated parameter coordinates; empty = none
  std::optional<PriorSpec> prior;      // fresh-draw source; absent disables the fresh slice

  void validate(const StateLayout& layout) const;
};

// Greedy herding score of a candidate: the weighted attraction to the
// embedding minus the average repulsion from the points selected so far.
// With nothing selected this is the plain first-point objective.
double herding_objective(const MixtureState& candidate, const PosteriorEmbedding& embedding,
                         const std::vector<MixtureState>& selected,
                         const ProductStateKernelSpec& kernel);

// Deterministic posterior sampling: n_out states chosen greedily, each the
// argmax of herding_objective over a freshly built candidate pool. Ties go
// to the lowest pool index; repeats are allowed. Deterministic given seed.
ParticleEnsemble herd_sample(const PosteriorEmbedding& embedding, int n_out,
                             const ProductStateKernelSpec& kernel, const HerdingConfig& config,
                             RngStream& rng);

// RKHS distance between the embedding and the empirical average of the
// points, by Gram expansion, floored at zero before the square root.
double mmd_to_embedding(const std::vector<MixtureState>& points,
                        const PosteriorEmbedding& embedding,
                        const ProductStateKernelSpec& kernel);

}  // namespace krsel

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "krsel/simulators.hpp"
#include "krsel/state.hpp"

namespace krsel {

// A fully instantiated experiment: candidate models over a fixed design /
// observation window, the box priors, the ground truth used to generate
// observed data, and the extrapolation (holdout) counterparts.
struct ExperimentDef {
  std::string name;
  std::vector<std::string> model_names;
  std::vector<ModelSpec> models;
  std::vector<ModelSpec> holdout_models;  // empty when the experiment has no holdout design
  PriorSpec priors;
  int truth_model = 0;
  std::vector<double> truth_params;
  std::vector<std::uint8_t> nonneg_mask;  // concatenated parameter coordinates
  int summary_dim = 0;
  int holdout_dim = 0;
  bool default_arctan = false;

  SummaryVector sample_observed(RngStream& rng) const;
  SummaryVector sample_observed_holdout(RngStream& rng) const;
};

// Registered experiment identifiers.
std::vector<std::string> experiment_names();

// Instantiate a registered experiment. `dirichlet_alpha` feeds the simplex
// prior; `arctan` overrides the experiment's default transform when set.
ExperimentDef make_experiment(const std::string& name, double dirichlet_alpha,
                              std::optional<bool> arctan = std::nullopt);

}  // namespace krsel

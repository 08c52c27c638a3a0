#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "krsel/ode.hpp"
#include "krsel/rng.hpp"
#include "krsel/simulators_fwd.hpp"
#include "krsel/state.hpp"

namespace krsel {

// A candidate model: parameter dimension and a stochastic simulator mapping
// parameters plus a noise stream to a summary vector of fixed length.
struct ModelSpec {
  std::string name;
  int dim = 0;
  std::function<SummaryVector(const ParamVector&, RngStream&)> simulator;
  std::vector<std::uint8_t> nonneg_mask;  // per-coordinate physical nonnegativity
};

// y_i = sum_l coeffs[l] * x_i^l + noise_sd * eps_i over the design grid.
SummaryVector simulate_polynomial(int order, const ParamVector& coeffs,
                                  std::span<const double> design, double noise_sd,
                                  RngStream& noise);

enum class OdeModelId { lotka_volterra, bazykin, sir, sir_latent, sir_reinfect };

std::optional<OdeModelId> ode_model_from_name(const std::string& name);
std::string ode_model_name(OdeModelId id);
int ode_param_dim(OdeModelId id);   // rate parameters only
int ode_state_dim(OdeModelId id);
// Compartments recorded in the summary (the latent compartment is never
// observed, so every epidemic model reports three series).
std::vector<int> ode_observed_compartments(OdeModelId id);
std::vector<double> ode_default_initial_state(OdeModelId id);

struct OdeSimOptions {
  int t_begin = 0;       // first recorded integer time
  int t_count = 0;       // number of recorded integer times
  double noise_sd = 1.0;
  bool arctan = false;
  int substeps = 40;
  bool init_from_params = false;  // trailing state_dim params give the initial state
};

// Dimension of the rate+initial-condition parameter vector under the options.
int ode_full_param_dim(OdeModelId id, const OdeSimOptions& opts);

// RHS and integration window for one of the named systems.
OdeSystem make_ode_system(OdeModelId id, const OdeSimOptions& opts);

// Integrate, clamp negative populations to zero, flatten the observation
// window time-major, add iid Gaussian noise per dimension, then optionally
// apply the arctangent transform.
SummaryVector simulate_ode_model(OdeModelId id, const ParamVector& params, RngStream& noise,
                                 const OdeSimOptions& opts);

// Draw a model index from the mixing coefficients, then simulate from that
// model with its own parameters.
std::pair<SummaryVector, int> simulate_mixture(const MixtureState& state,
                                               const std::vector<ModelSpec>& models,
                                               RngStream& rng);

SummaryVector arctan_transform(const SummaryVector& y);

}  // namespace krsel

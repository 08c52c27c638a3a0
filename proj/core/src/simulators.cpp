#include "krsel/simulators.hpp"

#include <cmath>

#include "krsel/errors.hpp"

namespace krsel {

SummaryVector simulate_polynomial(int order, const ParamVector& coeffs,
                                  std::span<const double> design, double noise_sd,
                                  RngStream& noise) {
  if (coeffs.dim() != order + 1) {
    throw ConfigError("polynomial of order " + std::to_string(order) + " needs " +
                      std::to_string(order + 1) + " coefficients");
  }
  SummaryVector out;
  out.values.reserve(design.size());
  for (double x : design) {
    // Horner evaluation of sum_l c_l x^l.
    double y = 0.0;
    for (int l = order; l >= 0; --l) {
      y = y * x + coeffs.theta[static_cast<std::size_t>(l)];
    }
    if (noise_sd > 0.0) y += noise_sd * noise.normal();
    out.values.push_back(y);
  }
  return out;
}

std::optional<OdeModelId> ode_model_from_name(const std::string& name) {
  if (name == "lotka_volterra") return OdeModelId::lotka_volterra;
  if (name == "bazykin") return OdeModelId::bazykin;
  if (name == "sir") return OdeModelId::sir;
  if (name == "sir_latent") return OdeModelId::sir_latent;
  if (name == "sir_reinfect") return OdeModelId::sir_reinfect;
  return std::nullopt;
}

std::string ode_model_name(OdeModelId id) {
  switch (id) {
    case OdeModelId::lotka_volterra: return "lotka_volterra";
    case OdeModelId::bazykin: return "bazykin";
    case OdeModelId::sir: return "sir";
    case OdeModelId::sir_latent: return "sir_latent";
    case OdeModelId::sir_reinfect: return "sir_reinfect";
  }
  throw ConfigError("unknown ODE model id");
}

int ode_param_dim(OdeModelId id) {
  switch (id) {
    case OdeModelId::lotka_volterra: return 4;
    case OdeModelId::bazykin: return 6;
    case OdeModelId::sir: return 4;
    case OdeModelId::sir_latent: return 5;
    case OdeModelId::sir_reinfect: return 5;
  }
  throw ConfigError("unknown ODE model id");
}

int ode_state_dim(OdeModelId id) {
  switch (id) {
    case OdeModelId::lotka_volterra:
    case OdeModelId::bazykin: return 2;
    case OdeModelId::sir:
    case OdeModelId::sir_reinfect: return 3;
    case OdeModelId::sir_latent: return 4;
  }
  throw ConfigError("unknown ODE model id");
}

std::vector<int> ode_observed_compartments(OdeModelId id) {
  if (id == OdeModelId::sir_latent) return {0, 2, 3};  // S, I, R; L stays hidden
  std::vector<int> all(static_cast<std::size_t>(ode_state_dim(id)));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return all;
}

std::vector<double> ode_default_initial_state(OdeModelId id) {
  switch (id) {
    case OdeModelId::lotka_volterra:
    case OdeModelId::bazykin: return {10.0, 5.0};
    case OdeModelId::sir:
    case OdeModelId::sir_reinfect: return {20.0, 50.0, 0.0};
    case OdeModelId::sir_latent: return {20.0, 0.0, 50.0, 0.0};  // S, L, I, R
  }
  throw ConfigError("unknown ODE model id");
}

int ode_full_param_dim(OdeModelId id, const OdeSimOptions& opts) {
  return ode_param_dim(id) + (opts.init_from_params ? ode_state_dim(id) : 0);
}

namespace {

OdeRhs ode_rhs(OdeModelId id) {
  switch (id) {
    case OdeModelId::lotka_volterra:
      return [](double, std::span<const double> s, std::span<const double> p,
                std::span<double> d) {
        const double x = s[0], y = s[1];
        d[0] = p[0] * x - p[1] * x * y;
        d[1] = -p[2] * y + p[3] * x * y;
      };
    case OdeModelId::bazykin:
      return [](double, std::span<const double> s, std::span<const double> p,
                std::span<double> d) {
        const double x = s[0], y = s[1];
        d[0] = p[0] * x - p[1] * x * y - p[4] * x * x;
        d[1] = -p[2] * y + p[3] * x * y - p[5] * y * y;
      };
    case OdeModelId::sir:
      return [](double, std::span<const double> s, std::span<const double> p,
                std::span<double> d) {
        const double S = s[0], I = s[1], R = s[2];
        const double alpha = p[0], gamma = p[1], death = p[2], nu = p[3];
        d[0] = alpha - gamma * S * I - death * S;
        d[1] = gamma * S * I - nu * I - death * I;
        d[2] = nu * I - death * R;
      };
    case OdeModelId::sir_latent:
      return [](double, std::span<const double> s, std::span<const double> p,
                std::span<double> d) {
        const double S = s[0], L = s[1], I = s[2], R = s[3];
        const double alpha = p[0], gamma = p[1], death = p[2], nu = p[3], lat = p[4];
        d[0] = alpha - gamma * S * I - death * S;
        d[1] = gamma * S * I - lat * L - death * L;
        d[2] = lat * L - nu * I - death * I;
        d[3] = nu * I - death * R;
      };
    case OdeModelId::sir_reinfect:
      return [](double, std::span<const double> s, std::span<const double> p,
                std::span<double> d) {
        const double S = s[0], I = s[1], R = s[2];
        const double alpha = p[0], gamma = p[1], death = p[2], nu = p[3], re = p[4];
        d[0] = alpha - gamma * S * I - death * S + re * R;
        d[1] = gamma * S * I - nu * I - death * I;
        d[2] = nu * I - (death + re) * R;
      };
  }
  throw ConfigError("unknown ODE model id");
}

}  // namespace

OdeSystem make_ode_system(OdeModelId id, const OdeSimOptions& opts) {
  if (opts.t_count < 1) throw ConfigError("observation window needs t_count >= 1");
  if (opts.t_begin < 0) throw ConfigError("t_begin must be nonnegative");
  OdeSystem sys;
  sys.state_dim = ode_state_dim(id);
  sys.derivative = ode_rhs(id);
  sys.initial_state = ode_default_initial_state(id);
  sys.init_from_trailing_params = opts.init_from_params;
  sys.t_end = static_cast<double>(opts.t_begin + opts.t_count - 1);
  sys.obs_stride = 1.0;
  sys.substeps = opts.substeps;
  return sys;
}

SummaryVector simulate_ode_model(OdeModelId id, const ParamVector& params, RngStream& noise,
                                 const OdeSimOptions& opts) {
  if (params.dim() != ode_full_param_dim(id, opts)) {
    throw ConfigError(ode_model_name(id) + " expects " +
                      std::to_string(ode_full_param_dim(id, opts)) + " parameters, got " +
                      std::to_string(params.dim()));
  }
  const OdeSystem sys = make_ode_system(id, opts);
  const Trajectory traj = rk4_integrate(sys, params);
  const std::vector<int> observed = ode_observed_compartments(id);

  SummaryVector out;
  out.clamped = traj.clamped;
  out.values.reserve(static_cast<std::size_t>(opts.t_count) * observed.size());
  for (int t = opts.t_begin; t < opts.t_begin + opts.t_count; ++t) {
    for (int c : observed) {
      out.values.push_back(std::max(traj(t, c), 0.0));  // populations are nonnegative
    }
  }
  if (opts.noise_sd > 0.0) {
    for (double& v : out.values) v += opts.noise_sd * noise.normal();
  }
  if (opts.arctan) return arctan_transform(out);
  return out;
}

std::pair<SummaryVector, int> simulate_mixture(const MixtureState& state,
                                               const std::vector<ModelSpec>& models,
                                               RngStream& rng) {
  if (static_cast<int>(models.size()) != state.n_models()) {
    throw ConfigError("simulate_mixture: model count mismatch");
  }
  const int m = rng.categorical(state.weights.values());
  const auto& model = models[static_cast<std::size_t>(m)];
  const auto& theta = state.params[static_cast<std::size_t>(m)];
  if (theta.dim() != model.dim) {
    throw ConfigError("simulate_mixture: parameter dimension mismatch for model " + model.name);
  }
  return {model.simulator(theta, rng), m};
}

SummaryVector arctan_transform(const SummaryVector& y) {
  SummaryVector out = y;
  for (double& v : out.values) v = std::atan(v);
  return out;
}

}  // namespace krsel

#include "krsel/ode.hpp"

#include <cmath>

#include "krsel/errors.hpp"

namespace krsel {

namespace {

// NaN goes to +limit, infinities and overflows keep their sign.
bool clamp_state(std::span<double> state) {
  bool clamped = false;
  for (double& v : state) {
    if (std::isnan(v)) {
      v = kOdeClampLimit;
      clamped = true;
    } else if (v > kOdeClampLimit) {
      v = kOdeClampLimit;
      clamped = true;
    } else if (v < -kOdeClampLimit) {
      v = -kOdeClampLimit;
      clamped = true;
    }
  }
  return clamped;
}

}  // namespace

Trajectory rk4_integrate(const OdeSystem& system, const ParamVector& params) {
  if (system.state_dim < 1) throw ConfigError("ODE system needs state_dim >= 1");
  if (!system.derivative) throw ConfigError("ODE system has no derivative function");
  if (!(system.obs_stride > 0.0)) throw ConfigError("obs_stride must be positive");
  if (system.substeps < 1) throw ConfigError("substeps must be >= 1");
  if (!(system.t_end >= 0.0)) throw ConfigError("t_end must be nonnegative");

  const int d = system.state_dim;
  std::vector<double> state;
  if (system.init_from_trailing_params) {
    if (params.dim() < d) {
      throw ConfigError("parameterized initial state needs state_dim trailing parameters");
    }
    state.assign(params.theta.end() - d, params.theta.end());
  } else {
    if (static_cast<int>(system.initial_state.size()) != d) {
      throw ConfigError("initial_state length does not match state_dim");
    }
    state = system.initial_state;
  }
  for (double v : state) {
    if (!std::isfinite(v)) throw ConfigError("initial state must be finite");
  }
  for (double v : params.theta) {
    if (!std::isfinite(v)) throw ConfigError("ODE parameters must be finite");
  }

  const int n_obs = static_cast<int>(std::floor(system.t_end / system.obs_stride + 0.5)) + 1;
  const double h = system.obs_stride / static_cast<double>(system.substeps);

  Trajectory traj;
  traj.rows = n_obs;
  traj.cols = d;
  traj.data.reserve(static_cast<std::size_t>(n_obs) * static_cast<std::size_t>(d));

  std::vector<double> k1(static_cast<std::size_t>(d)), k2(k1), k3(k1), k4(k1), tmp(k1);
  const std::span<const double> p(params.theta);

  traj.clamped |= clamp_state(state);
  traj.data.insert(traj.data.end(), state.begin(), state.end());

  double t = 0.0;
  for (int obs = 1; obs < n_obs; ++obs) {
    for (int s = 0; s < system.substeps; ++s) {
      system.derivative(t, state, p, k1);
      for (int j = 0; j < d; ++j) tmp[static_cast<std::size_t>(j)] = state[static_cast<std::size_t>(j)] + 0.5 * h * k1[static_cast<std::size_t>(j)];
      system.derivative(t + 0.5 * h, tmp, p, k2);
      for (int j = 0; j < d; ++j) tmp[static_cast<std::size_t>(j)] = state[static_cast<std::size_t>(j)] + 0.5 * h * k2[static_cast<std::size_t>(j)];
      system.derivative(t + 0.5 * h, tmp, p, k3);
      for (int j = 0; j < d; ++j) tmp[static_cast<std::size_t>(j)] = state[static_cast<std::size_t>(j)] + h * k3[static_cast<std::size_t>(j)];
      system.derivative(t + h, tmp, p, k4);
      for (int j = 0; j < d; ++j) {
        const auto u = static_cast<std::size_t>(j);
        state[u] += (h / 6.0) * (k1[u] + 2.0 * k2[u] + 2.0 * k3[u] + k4[u]);
      }
      traj.clamped |= clamp_state(state);
      t += h;
    }
    traj.data.insert(traj.data.end(), state.begin(), state.end());
  }
  return traj;
}

}  // namespace krsel

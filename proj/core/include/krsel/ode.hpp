#pragma once

#include <functional>
#include <span>
#include <vector>

#include "krsel/state.hpp"

namespace krsel {

// Right-hand side f(t, state, params) -> d(state)/dt, written into `out`.
using OdeRhs =
    std::function<void(double t, std::span<const double> state, std::span<const double> params,
                       std::span<double> out)>;

struct OdeSystem {
  int state_dim = 0;
  OdeRhs derivative;
  std::vector<double> initial_state;   // ignored when init_from_trailing_params
  bool init_from_trailing_params = false;  // last state_dim params are the initial state
  double t_end = 0.0;
  double obs_stride = 1.0;  // time between recorded observations
  int substeps = 40;        // RK4 substeps per observation interval
};

// Row-major (time x state_dim) record of the integration grid t = 0, 1h, ...
struct Trajectory {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;
  bool clamped = false;  // a state component was non-finite or beyond +-1e8

  double operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols) +
                static_cast<std::size_t>(j)];
  }
  std::span<const double> row(int i) const {
    return {data.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(cols),
            static_cast<std::size_t>(cols)};
  }
};

// Magnitude beyond which a state component is clamped (and the trajectory
// flagged); keeps Gram matrices finite under explosive parameter draws.
inline constexpr double kOdeClampLimit = 1e8;

// Classical fixed-step 4th-order Runge-Kutta. Records the state at
// t = 0, obs_stride, 2*obs_stride, ..., t_end.
Trajectory rk4_integrate(const OdeSystem& system, const ParamVector& params);

}  // namespace krsel

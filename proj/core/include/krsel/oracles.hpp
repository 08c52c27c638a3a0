#pragma once

#include <functional>
#include <vector>

#include "krsel/harness.hpp"

namespace krsel {

// A tractable mixture toy: each candidate model has a finite parameter grid
// with a uniform prior over it and a closed-form density y -> p(y | theta).
struct GridModel {
  std::vector<double> grid;
  std::function<double(double y, double theta)> density;
};

struct MixtureGridToy {
  double dirichlet_alpha = 1.0;
  std::vector<GridModel> models;  // one or two models
  double y_star = 0.0;
  int quadrature_nodes = 512;  // midpoint rule over the simplex edge
};

// Checks that the marginal posterior of the mixing coefficients after N
// recursive updates factors into the previous marginal times the
// coefficient-weighted per-model evidences (normalized). Both sides are
// evaluated by independent summation orders on a grid of simplex points;
// returns the maximum relative discrepancy.
double mixture_weight_identity_check(const MixtureGridToy& toy, int recursion,
                                     int simplex_eval_points = 9);

// Single-model location toy: observed data is n_obs draws of N(truth, 1) and
// the maximum likelihood estimate is their mean. Runs the full recursive
// update and returns |first herded theta - MLE| per recursion.
struct PowerPosteriorToy {
  double truth = 3.0;
  Box prior{-10.0, 0.0};
  int n_obs = 10;
  int recursions = 15;
  int n_per_iter = 100;
  double s = 1.0;
  double delta = 0.1;
  HerdingConfig herding;
};

std::vector<double> power_posterior_concentration(const PowerPosteriorToy& toy,
                                                  std::uint64_t seed);

}  // namespace krsel

#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "krsel/errors.hpp"
#include "krsel/state.hpp"

namespace krsel {

// k(x, x') = exp(-||x - x'||^2 / bandwidth^2)
struct GaussianKernelSpec {
  double bandwidth = 1.0;

  void validate() const;
};

// Product kernel on the state space: a Gaussian on the simplex block times
// one Gaussian per model parameter block.
struct ProductStateKernelSpec {
  double simplex_bandwidth = 1.0;
  std::vector<double> param_bandwidths;

  void validate() const;
};

// Squared Euclidean distance, accumulated in extended precision and never
// through the sum-of-squares expansion (cancellation near zero distance).
double squared_distance(std::span<const double> x, std::span<const double> y);

double gaussian_eval(std::span<const double> x, std::span<const double> y,
                     const GaussianKernelSpec& spec);

double state_kernel_eval(const MixtureState& a, const MixtureState& b,
                         const ProductStateKernelSpec& spec);

// Same product evaluation, identical arithmetic, but no per-call spec or
// dimension validation. For hot loops whose caller validated once up front.
double state_kernel_eval_unchecked(const MixtureState& a, const MixtureState& b,
                                   const ProductStateKernelSpec& spec);

// scale * median of pairwise Euclidean distances over distinct index pairs.
// Falls back to scale * 1.0 when there are no pairs or all distances are 0.
double median_heuristic(const std::vector<std::vector<double>>& points, double scale);

// Symmetric Gram matrix: upper triangle evaluated, then mirrored. Throws
// NumericalError on a non-finite entry.
template <class Point, class Kernel>
Eigen::MatrixXd gram_matrix(const std::vector<Point>& points, Kernel&& kernel) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < 1) throw ConfigError("gram_matrix needs at least one point");
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = kernel(points[static_cast<std::size_t>(i)],
                              points[static_cast<std::size_t>(j)]);
      if (!std::isfinite(v)) {
        throw NumericalError("non-finite Gram entry at (" + std::to_string(i) + ", " +
                             std::to_string(j) + ")");
      }
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

}  // namespace krsel

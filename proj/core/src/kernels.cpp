#include "krsel/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace krsel {

void GaussianKernelSpec::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw ConfigError("Gaussian bandwidth must be positive and finite");
  }
}

void ProductStateKernelSpec::validate() const {
  GaussianKernelSpec{simplex_bandwidth}.validate();
  if (param_bandwidths.empty()) throw ConfigError("state kernel needs per-model bandwidths");
  for (double b : param_bandwidths) GaussianKernelSpec{b}.validate();
}

namespace {

inline double squared_distance_raw(std::span<const double> x, std::span<const double> y) {
  long double acc = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double d = static_cast<long double>(x[i]) - static_cast<long double>(y[i]);
    acc += d * d;
  }
  return static_cast<double>(acc);
}

inline double gaussian_block(std::span<const double> x, std::span<const double> y,
                             double bandwidth) {
  return std::exp(-squared_distance_raw(x, y) / (bandwidth * bandwidth));
}

}  // namespace

double squared_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("squared_distance: dimension mismatch");
  return squared_distance_raw(x, y);
}

double gaussian_eval(std::span<const double> x, std::span<const double> y,
                     const GaussianKernelSpec& spec) {
  spec.validate();
  if (x.size() != y.size()) throw ConfigError("gaussian_eval: dimension mismatch");
  const double d2 = squared_distance_raw(x, y);
  if (!std::isfinite(d2)) throw NumericalError("gaussian_eval: non-finite input");
  return std::exp(-d2 / (spec.bandwidth * spec.bandwidth));
}

double state_kernel_eval_unchecked(const MixtureState& a, const MixtureState& b,
                                   const ProductStateKernelSpec& spec) {
  double k = gaussian_block(a.weights.values(), b.weights.values(), spec.simplex_bandwidth);
  for (std::size_t m = 0; m < a.params.size(); ++m) {
    k *= gaussian_block(a.params[m].theta, b.params[m].theta, spec.param_bandwidths[m]);
  }
  return k;
}

double state_kernel_eval(const MixtureState& a, const MixtureState& b,
                         const ProductStateKernelSpec& spec) {
  spec.validate();
  if (a.n_models() != b.n_models() ||
      static_cast<int>(spec.param_bandwidths.size()) != a.n_models()) {
    throw ConfigError("state_kernel_eval: model count mismatch");
  }
  for (int m = 0; m < a.n_models(); ++m) {
    if (a.params[static_cast<std::size_t>(m)].dim() != b.params[static_cast<std::size_t>(m)].dim()) {
      throw ConfigError("state_kernel_eval: parameter dimension mismatch");
    }
  }
  return state_kernel_eval_unchecked(a, b, spec);
}

double median_heuristic(const std::vector<std::vector<double>>& points, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ConfigError("median_heuristic scale must be positive and finite");
  }
  if (points.empty()) throw ConfigError("median_heuristic: empty input");
  const std::size_t n = points.size();
  std::vector<double> dists;
  dists.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dists.push_back(std::sqrt(squared_distance(points[i], points[j])));
    }
  }
  if (dists.empty()) return scale;  // single point
  std::sort(dists.begin(), dists.end());
  const std::size_t m = dists.size();
  const double med = (m % 2 == 1) ? dists[m / 2] : 0.5 * (dists[m / 2 - 1] + dists[m / 2]);
  if (med <= 0.0) return scale;  // all points coincide
  return scale * med;
}

}  // namespace krsel

#include "krsel/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "krsel/errors.hpp"

namespace krsel {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t state = root;
  std::uint64_t out = splitmix64(state);
  state ^= a;
  out ^= splitmix64(state);
  state ^= b;
  out ^= splitmix64(state);
  state ^= c;
  out ^= splitmix64(state);
  return out;
}

double RngStream::uniform() {
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double RngStream::normal() {
  return std::normal_distribution<double>(0.0, 1.0)(engine_);
}

double RngStream::gamma(double shape) {
  return std::gamma_distribution<double>(shape, 1.0)(engine_);
}

int RngStream::categorical(std::span<const double> weights) {
  if (weights.empty()) throw ConfigError("categorical draw over empty weight vector");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("categorical weights must be nonnegative");
    total += w;
  }
  if (total <= 0.0) throw ConfigError("categorical weights sum to zero");
  const double u = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

std::vector<double> sample_symmetric_dirichlet(double alpha, int k, RngStream& rng) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("Dirichlet concentration must be positive and finite");
  }
  if (k < 1) throw ConfigError("Dirichlet dimension must be >= 1");

  std::vector<double> phi(static_cast<std::size_t>(k));
  if (alpha < 0.1) {
    // Gamma(alpha) = Gamma(alpha+1) * U^{1/alpha}, carried out in log space.
    std::vector<double> logx(phi.size());
    double max_log = -std::numeric_limits<double>::infinity();
    for (auto& lx : logx) {
      const double g = rng.gamma(alpha + 1.0);
      const double u = rng.uniform();
      lx = std::log(g) + std::log(u) / alpha;
      max_log = std::max(max_log, lx);
    }
    if (!std::isfinite(max_log)) {
      // Degenerate draw: all mass on one uniformly chosen index (alpha -> 0 limit).
      std::fill(phi.begin(), phi.end(), 0.0);
      phi[static_cast<std::size_t>(rng.engine()() % static_cast<std::uint64_t>(k))] = 1.0;
      return phi;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      phi[i] = std::exp(logx[i] - max_log);
      sum += phi[i];
    }
    for (auto& p : phi) p /= sum;
    return phi;
  }

  double sum = 0.0;
  for (auto& p : phi) {
    p = rng.gamma(alpha);
    sum += p;
  }
  if (sum <= 0.0) {
    std::fill(phi.begin(), phi.end(), 0.0);
    phi[static_cast<std::size_t>(rng.engine()() % static_cast<std::uint64_t>(k))] = 1.0;
    return phi;
  }
  for (auto& p : phi) p /= sum;
  return phi;
}

}  // namespace krsel

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace krsel {

// Deterministic seed derivation (splitmix64-style mixing). Used to carve
// disjoint substreams out of a root seed: (root, recursion, particle, ...).
std::uint64_t mix_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0);

// A seeded random stream. Substreams are derived from the stream's seed
// alone (not from its consumption state), so the same tags always name the
// same stream regardless of draw order.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed, 0x9e3779b9)) {}

  RngStream substream(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
    return RngStream(mix_seed(seed_, a, b, c));
  }
  std::uint64_t seed() const { return seed_; }

  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double normal();  // N(0, 1)
  double gamma(double shape);  // Gamma(shape, 1)
  std::uint64_t next_u64() { return engine_(); }

  // Single draw from the discrete distribution with the given nonnegative
  // weights (need not be normalized). Returns an index in [0, size).
  int categorical(std::span<const double> weights);

  std::mt19937_64& engine() { return engine_; }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Dirichlet(alpha, ..., alpha) on the K-simplex via normalized Gamma draws.
// For alpha < 0.1 the draw runs in log space (Gamma(alpha+1) boosting), so
// concentrations like 0.01 do not underflow to an all-zero vector. If a draw
// still degenerates, all mass goes to one uniformly chosen index.
std::vector<double> sample_symmetric_dirichlet(double alpha, int k, RngStream& rng);

}  // namespace krsel

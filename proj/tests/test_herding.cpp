#include <doctest.h>

#include <cmath>

#include "krsel/errors.hpp"
#include "krsel/herding.hpp"
#include "krsel/rng.hpp"

using namespace krsel;

namespace {

MixtureState state1(double theta) {
  return MixtureState{SimplexWeights({1.0}), {ParamVector{{theta}, 0}}};
}

PosteriorEmbedding embedding_of(std::vector<double> thetas, std::vector<double> weights) {
  ParticleEnsemble ensemble;
  for (double t : thetas) ensemble.states.push_back(state1(t));
  return PosteriorEmbedding{std::move(ensemble), std::move(weights)};
}

const ProductStateKernelSpec kUnitKernel{1.0, {1.0}};

HerdingConfig particles_only_config() {
  HerdingConfig cfg;
  cfg.pool_multiplier = 1;
  cfg.fresh_prior_fraction = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("herding objective reduces to the first-point objective when nothing is selected") {
  const auto embedding = embedding_of({2.0}, {1.0});
  CHECK(herding_objective(state1(2.0), embedding, {}, kUnitKernel) == doctest::Approx(1.0));
}

TEST_CASE("with zero weights only the repulsion term remains") {
  const auto embedding = embedding_of({2.0}, {0.0});
  const std::vector<MixtureState> selected = {state1(5.0)};
  // t = 1: -(1/2) k(c, c) = -1/2 at the selected point itself.
  CHECK(herding_objective(state1(5.0), embedding, selected, kUnitKernel) ==
        doctest::Approx(-0.5));
}

TEST_CASE("three-particle objective matches explicit arithmetic") {
  const std::vector<double> thetas = {0.0, 1.0, 2.5};
  const std::vector<double> weights = {0.4, -0.3, 0.8};
  const auto embedding = embedding_of(thetas, weights);
  const std::vector<MixtureState> selected = {state1(0.5), state1(2.0)};
  const MixtureState candidate = state1(1.2);

  auto k = [](double a, double b) { return std::exp(-(a - b) * (a - b)); };
  const double attraction =
      0.4 * k(1.2, 0.0) + (-0.3) * k(1.2, 1.0) + 0.8 * k(1.2, 2.5);
  const double repulsion = (k(1.2, 0.5) + k(1.2, 2.0)) / 3.0;
  CHECK(herding_objective(candidate, embedding, selected, kUnitKernel) ==
        doctest::Approx(attraction - repulsion).epsilon(1e-12));
}

TEST_CASE("first herded point is the exhaustive argmax over the particle pool") {
  const std::vector<double> thetas = {0.0, 10.0, 20.0};
  const std::vector<double> weights = {0.1, 0.9, 0.2};
  const auto embedding = embedding_of(thetas, weights);
  RngStream rng(5);
  const auto out = herd_sample(embedding, 3, kUnitKernel, particles_only_config(), rng);

  // Independent scan of the attraction sum over the three candidates.
  int best = 0;
  double best_value = -1e300;
  for (std::size_t c = 0; c < thetas.size(); ++c) {
    double value = 0.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      value += weights[i] * state_kernel_eval(embedding.particles.states[c],
                                              embedding.particles.states[i], kUnitKernel);
    }
    if (value > best_value) {
      best_value = value;
      best = static_cast<int>(c);
    }
  }
  CHECK(best == 1);
  CHECK(out.states[0].params[0].theta[0] == thetas[static_cast<std::size_t>(best)]);
  CHECK(out.recursion_index == 2);
}

TEST_CASE("greedy selections stay optimal within the pool at every step") {
  RngStream gen(21);
  std::vector<double> thetas, weights;
  for (int i = 0; i < 8; ++i) {
    thetas.push_back(gen.normal() * 2.0);
    weights.push_back(gen.normal());
  }
  const auto embedding = embedding_of(thetas, weights);
  RngStream rng(6);
  const auto out = herd_sample(embedding, 8, kUnitKernel, particles_only_config(), rng);

  std::vector<MixtureState> selected;
  for (const auto& pick : out.states) {
    const double picked = herding_objective(pick, embedding, selected, kUnitKernel);
    for (const auto& candidate : embedding.particles.states) {
      CHECK(herding_objective(candidate, embedding, selected, kUnitKernel) <= picked + 1e-12);
    }
    selected.push_back(pick);
  }
}

TEST_CASE("single-candidate pools repeat the only particle") {
  const auto embedding = embedding_of({3.5}, {0.7});
  RngStream rng(7);
  const auto out = herd_sample(embedding, 5, kUnitKernel, particles_only_config(), rng);
  CHECK(out.size() == 5);
  for (const auto& s : out.states) CHECK(s.params[0].theta[0] == 3.5);
}

TEST_CASE("herding is deterministic given the seed") {
  RngStream gen(22);
  std::vector<double> thetas, weights;
  for (int i = 0; i < 10; ++i) {
    thetas.push_back(gen.normal());
    weights.push_back(gen.uniform());
  }
  const auto embedding = embedding_of(thetas, weights);
  HerdingConfig cfg;  // full pool with perturbations
  RngStream a(123), b(123);
  const auto out_a = herd_sample(embedding, 10, kUnitKernel, cfg, a);
  const auto out_b = herd_sample(embedding, 10, kUnitKernel, cfg, b);
  for (int i = 0; i < 10; ++i) {
    CHECK(flatten(out_a.states[static_cast<std::size_t>(i)]) ==
          flatten(out_b.states[static_cast<std::size_t>(i)]));
  }
}

TEST_CASE("herded prefixes drive the MMD down") {
  RngStream gen(23);
  std::vector<double> thetas;
  for (int i = 0; i < 20; ++i) thetas.push_back(gen.normal());
  std::vector<double> weights(20, 1.0 / 20.0);
  const auto embedding = embedding_of(thetas, weights);

  HerdingConfig cfg;
  cfg.pool_multiplier = 5;
  cfg.fresh_prior_fraction = 0.0;
  RngStream rng(8);
  const auto out = herd_sample(embedding, 40, kUnitKernel, cfg, rng);

  double last = 1e300;
  for (int t : {5, 10, 20, 40}) {
    const std::vector<MixtureState> prefix(out.states.begin(), out.states.begin() + t);
    const double mmd = mmd_to_embedding(prefix, embedding, kUnitKernel);
    CHECK(mmd <= last + 1e-12);
    last = mmd;
  }
}

TEST_CASE("mmd vanishes when the points reproduce a uniform embedding") {
  RngStream gen(24);
  std::vector<double> thetas;
  for (int i = 0; i < 12; ++i) thetas.push_back(gen.normal());
  const auto embedding = embedding_of(thetas, std::vector<double>(12, 1.0 / 12.0));
  CHECK(mmd_to_embedding(embedding.particles.states, embedding, kUnitKernel) ==
        doctest::Approx(0.0).epsilon(1e-9));

  const auto single = embedding_of({1.5}, {1.0});
  CHECK(mmd_to_embedding({state1(1.5)}, single, kUnitKernel) == doctest::Approx(0.0));
}

TEST_CASE("two-particle mmd matches the explicit Gram expansion") {
  const auto embedding = embedding_of({0.0, 1.0}, {0.6, 0.3});
  const std::vector<MixtureState> points = {state1(0.5)};
  auto k = [](double a, double b) { return std::exp(-(a - b) * (a - b)); };
  const double mu_sq = 0.36 + 0.09 + 2 * 0.6 * 0.3 * k(0.0, 1.0);
  const double cross = 0.6 * k(0.0, 0.5) + 0.3 * k(1.0, 0.5);
  const double expected = std::sqrt(mu_sq - 2 * cross + 1.0);
  CHECK(mmd_to_embedding(points, embedding, kUnitKernel) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("outputs are valid states and respect the nonnegativity mask") {
  RngStream gen(25);
  ParticleEnsemble ensemble;
  for (int i = 0; i < 10; ++i) {
    ensemble.states.push_back(MixtureState{
        SimplexWeights({0.5, 0.5}),
        {ParamVector{{0.02 + 0.01 * gen.uniform()}, 0}, ParamVector{{gen.normal()}, 1}}});
  }
  PosteriorEmbedding embedding{ensemble, std::vector<double>(10, 0.1)};
  ProductStateKernelSpec kernel{1.0, {1.0, 1.0}};
  HerdingConfig cfg;
  cfg.perturbation_scale = 50.0;  // exaggerate to force clamping
  cfg.nonneg_mask = {1, 0};
  RngStream rng(9);
  const auto out = herd_sample(embedding, 20, kernel, cfg, rng);
  for (const auto& s : out.states) {
    double sum = 0.0;
    for (double p : s.weights.values()) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s.params[0].theta[0] >= 0.0);
  }
}

TEST_CASE("prior boxes never clip herded parameters") {
  RngStream gen(26);
  ParticleEnsemble ensemble;
  for (int i = 0; i < 10; ++i) {
    ensemble.states.push_back(state1(35.0 + gen.normal()));
  }
  PosteriorEmbedding embedding{ensemble, std::vector<double>(10, 0.1)};
  HerdingConfig cfg;
  cfg.prior = PriorSpec{1.0, {{Box{0.0, 30.0}}}};  // the particles live outside it
  RngStream rng(10);
  const auto out = herd_sample(embedding, 10, kUnitKernel, cfg, rng);
  double max_theta = -1e300;
  for (const auto& s : out.states) max_theta = std::max(max_theta, s.params[0].theta[0]);
  CHECK(max_theta > 30.0);
}

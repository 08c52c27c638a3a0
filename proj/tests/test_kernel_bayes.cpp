#include <doctest.h>

#include <cmath>

#include "krsel/errors.hpp"
#include "krsel/kernel_bayes.hpp"
#include "krsel/log.hpp"
#include "krsel/rng.hpp"

using namespace krsel;

TEST_CASE("scalar ridge solve") {
  Eigen::MatrixXd g(1, 1);
  g << 1.0;
  Eigen::VectorXd k(1);
  k << 0.5;
  const auto w = kernel_abc_weights(g, k, 0.5);  // (1 + 0.5) w = 0.5
  CHECK(w.size() == 1);
  CHECK(w[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("identity Gram with n delta regularizer") {
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd k(2);
  k << 1.0, 1.0;
  const auto w = kernel_abc_weights(g, k, 0.5);  // (I + 2*0.5 I) w = 1
  CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("2x2 solve matches the explicit inverse") {
  Eigen::MatrixXd g(2, 2);
  g << 1.0, 0.5, 0.5, 1.0;
  Eigen::VectorXd k(2);
  k << 0.9, 0.1;
  const double delta = 0.1;
  const auto w = kernel_abc_weights(g, k, delta);

  // Closed-form inverse of (G + 2 delta I).
  const double a = 1.0 + 2.0 * delta, b = 0.5;
  const double det = a * a - b * b;
  const double w0 = (a * 0.9 - b * 0.1) / det;
  const double w1 = (-b * 0.9 + a * 0.1) / det;
  CHECK(w[0] == doctest::Approx(w0).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(w1).epsilon(1e-12));
}

TEST_CASE("residual bound holds on random SPD systems") {
  RngStream rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 + static_cast<int>(rng.engine()() % 5);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
    }
    Eigen::MatrixXd g = a * a.transpose();  // PSD
    g /= std::max(1.0, g.norm());
    Eigen::VectorXd k(n);
    for (int i = 0; i < n; ++i) k(i) = rng.uniform();
    const double delta = 0.05 + rng.uniform();
    const auto w = kernel_abc_weights(g, k, delta);

    Eigen::MatrixXd reg = g;
    reg.diagonal().array() += n * delta;
    Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), n);
    const double residual = (reg * wv - k).lpNorm<Eigen::Infinity>();
    CHECK(residual <= 1e-8 * k.lpNorm<Eigen::Infinity>());
  }
}

TEST_CASE("permuting the system permutes the weights") {
  Eigen::MatrixXd g(3, 3);
  g << 1.0, 0.6, 0.2, 0.6, 1.0, 0.4, 0.2, 0.4, 1.0;
  Eigen::VectorXd k(3);
  k << 0.9, 0.5, 0.1;
  const auto w = kernel_abc_weights(g, k, 0.2);

  // Swap indices 0 and 2.
  Eigen::PermutationMatrix<3> perm;
  perm.indices() << 2, 1, 0;
  Eigen::MatrixXd gp = perm * g * perm.transpose();
  Eigen::VectorXd kp = perm * k;
  const auto wp = kernel_abc_weights(gp, kp, 0.2);
  CHECK(wp[0] == doctest::Approx(w[2]).epsilon(1e-12));
  CHECK(wp[1] == doctest::Approx(w[1]).epsilon(1e-12));
  CHECK(wp[2] == doctest::Approx(w[0]).epsilon(1e-12));
}

TEST_CASE("weights shrink as delta grows") {
  Eigen::MatrixXd g(3, 3);
  g << 1.0, 0.7, 0.3, 0.7, 1.0, 0.5, 0.3, 0.5, 1.0;
  Eigen::VectorXd k(3);
  k << 0.8, 0.6, 0.2;
  double last = 1e300;
  for (double delta : {1.0, 10.0, 100.0}) {
    const auto w = kernel_abc_weights(g, k, delta);
    double norm = 0.0;
    for (double v : w) norm = std::max(norm, std::abs(v));
    CHECK(norm < last);
    last = norm;
  }
}

TEST_CASE("an all-but-zero k_star is not an error") {
  std::vector<std::string> warnings;
  set_log_sink([&](const std::string& msg) { warnings.push_back(msg); });

  ParticleEnsemble ensemble;
  ensemble.states = {MixtureState{SimplexWeights({1.0}), {ParamVector{{0.0}, 0}}},
                     MixtureState{SimplexWeights({1.0}), {ParamVector{{1.0}, 0}}}};
  std::vector<SummaryVector> sims = {SummaryVector{{0.0}}, SummaryVector{{0.1}}};
  SummaryVector observed{{1e6}};  // hopelessly far under bandwidth 1
  const auto embedding = embed_posterior(ensemble, observed, GaussianKernelSpec{1.0}, 0.1, sims);
  for (double w : embedding.weights) CHECK(std::abs(w) < 1e-12);
  CHECK(!warnings.empty());
  set_log_sink({});
}

TEST_CASE("embed_posterior pairs input particles with solved weights") {
  ParticleEnsemble ensemble;
  for (int i = 0; i < 3; ++i) {
    ensemble.states.push_back(
        MixtureState{SimplexWeights({1.0}), {ParamVector{{static_cast<double>(i)}, 0}}});
  }
  std::vector<SummaryVector> sims = {SummaryVector{{0.0}}, SummaryVector{{5.0}},
                                     SummaryVector{{100.0}}};
  SummaryVector observed{{0.0}};  // matches simulation 0 exactly
  const auto embedding =
      embed_posterior(ensemble, observed, GaussianKernelSpec{1.0}, 1e-4, sims);
  CHECK(embedding.size() == 3);
  CHECK(std::abs(embedding.weights[0]) > std::abs(embedding.weights[1]));
  CHECK(std::abs(embedding.weights[0]) > std::abs(embedding.weights[2]));

  // n = 1 reduces to k(y1, y*) / (1 + delta).
  ParticleEnsemble single;
  single.states = {ensemble.states[0]};
  std::vector<SummaryVector> one = {SummaryVector{{2.0}}};
  const auto e1 = embed_posterior(single, observed, GaussianKernelSpec{2.0}, 0.5, one);
  const double expected = gaussian_eval(one[0].values, observed.values, GaussianKernelSpec{2.0}) /
                          (1.0 + 0.5);
  CHECK(e1.weights[0] == doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(
      embed_posterior(single, observed, GaussianKernelSpec{1.0}, 0.5, sims),
      ConfigError);  // count mismatch
}

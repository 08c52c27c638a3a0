#include <doctest.h>

#include <Eigen/Cholesky>
#include <cmath>

#include "krsel/errors.hpp"
#include "krsel/kernels.hpp"
#include "krsel/rng.hpp"

using namespace krsel;

TEST_CASE("gaussian kernel basics") {
  const GaussianKernelSpec spec{2.0};
  const std::vector<double> x = {1.0, 2.0};
  CHECK(gaussian_eval(x, x, spec) == 1.0);

  // ||x - y|| equal to the bandwidth gives exp(-1).
  const std::vector<double> y = {1.0, 4.0};
  CHECK(gaussian_eval(x, y, spec) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));

  RngStream rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> a = {rng.normal(), rng.normal(), rng.normal()};
    std::vector<double> b = {rng.normal(), rng.normal(), rng.normal()};
    CHECK(gaussian_eval(a, b, spec) == gaussian_eval(b, a, spec));
    CHECK(gaussian_eval(a, b, spec) > 0.0);
    CHECK(gaussian_eval(a, b, spec) <= 1.0);
  }
  CHECK_THROWS_AS(gaussian_eval(x, std::vector<double>{1.0}, spec), ConfigError);
  CHECK_THROWS_AS(gaussian_eval(x, y, GaussianKernelSpec{0.0}), ConfigError);
}

namespace {

MixtureState make_state(std::vector<double> phi, std::vector<double> t0, std::vector<double> t1) {
  return MixtureState{SimplexWeights(std::move(phi)),
                      {ParamVector{std::move(t0), 0}, ParamVector{std::move(t1), 1}}};
}

}  // namespace

TEST_CASE("state kernel is the product of the block Gaussians") {
  ProductStateKernelSpec spec{0.7, {1.3, 2.1}};
  const MixtureState a = make_state({0.2, 0.8}, {1.0, -1.0}, {3.0});
  const MixtureState b = make_state({0.6, 0.4}, {0.5, 0.5}, {-2.0});

  CHECK(state_kernel_eval(a, a, spec) == 1.0);

  const double manual = gaussian_eval(a.weights.values(), b.weights.values(),
                                      GaussianKernelSpec{spec.simplex_bandwidth}) *
                        gaussian_eval(a.params[0].theta, b.params[0].theta,
                                      GaussianKernelSpec{spec.param_bandwidths[0]}) *
                        gaussian_eval(a.params[1].theta, b.params[1].theta,
                                      GaussianKernelSpec{spec.param_bandwidths[1]});
  CHECK(state_kernel_eval(a, b, spec) == doctest::Approx(manual).epsilon(1e-15));

  // Sending one factor to zero sends the product to zero.
  const MixtureState far = make_state({0.6, 0.4}, {0.5, 0.5}, {-2000.0});
  CHECK(state_kernel_eval(a, far, spec) <= state_kernel_eval(a, b, spec));
  CHECK(state_kernel_eval(a, far, spec) == doctest::Approx(0.0).epsilon(1e-30));
}

TEST_CASE("median heuristic over distinct pairs") {
  CHECK(median_heuristic({{0.0}, {2.0}}, 1.0) == doctest::Approx(2.0));
  // pairs {1, 9, 10} -> median 9
  CHECK(median_heuristic({{0.0}, {1.0}, {10.0}}, 1.0) == doctest::Approx(9.0));
  // degenerate: identical points fall back to scale * 1
  CHECK(median_heuristic({{3.0}, {3.0}, {3.0}, {3.0}, {3.0}}, 2.0) == doctest::Approx(2.0));
  CHECK(median_heuristic({{5.0}}, 4.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(median_heuristic({}, 1.0), ConfigError);

  // Permutation invariance and linear scaling in s.
  std::vector<std::vector<double>> pts = {{0.1, 1.0}, {2.0, -1.0}, {3.0, 0.5}, {-2.0, 2.0}};
  const double base = median_heuristic(pts, 1.0);
  std::swap(pts[0], pts[3]);
  std::swap(pts[1], pts[2]);
  CHECK(median_heuristic(pts, 1.0) == base);
  CHECK(median_heuristic(pts, 2.5) == doctest::Approx(2.5 * base).epsilon(1e-15));
}

TEST_CASE("gram matrices are symmetric with unit diagonal") {
  const GaussianKernelSpec spec{1.0};
  auto kernel = [&](const std::vector<double>& a, const std::vector<double>& b) {
    return gaussian_eval(a, b, spec);
  };

  const Eigen::MatrixXd g1 = gram_matrix(std::vector<std::vector<double>>{{0.0}}, kernel);
  CHECK(g1.rows() == 1);
  CHECK(g1(0, 0) == 1.0);

  // Three points with known pairwise distances 1, 2, 3.
  const std::vector<std::vector<double>> pts = {{0.0}, {1.0}, {3.0}};
  const Eigen::MatrixXd g = gram_matrix(pts, kernel);
  CHECK(g(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(g(1, 2) == doctest::Approx(std::exp(-4.0)).epsilon(1e-15));
  CHECK(g(0, 2) == doctest::Approx(std::exp(-9.0)).epsilon(1e-15));
  for (int i = 0; i < 3; ++i) {
    CHECK(g(i, i) == 1.0);
    for (int j = 0; j < 3; ++j) CHECK(g(i, j) == g(j, i));
  }

  // G + n delta I admits a Cholesky factorization.
  Eigen::MatrixXd reg = g;
  reg.diagonal().array() += 3 * 0.01;
  CHECK(Eigen::LLT<Eigen::MatrixXd>(reg).info() == Eigen::Success);
}

TEST_CASE("squared distances avoid the expansion pitfall near equality") {
  // Nearly equal large-magnitude points: the direct difference keeps the
  // tiny squared distance exact.
  const std::vector<double> a = {1e8, 1e8};
  const std::vector<double> b = {1e8 + 1e-4, 1e8};
  CHECK(squared_distance(a, b) == doctest::Approx(1e-8).epsilon(1e-10));
}

#include "krsel/kernel_bayes.hpp"

#include <cmath>
#include <string>

#include "krsel/errors.hpp"
#include "krsel/log.hpp"

namespace krsel {

namespace {

// Solution accepted when ||(G + n d I) w - k*||_inf <= kResidualTol * ||k*||_inf.
constexpr double kResidualTol = 1e-8;
constexpr int kMaxEscalations = 3;

bool try_solve(const Eigen::MatrixXd& gram, const Eigen::VectorXd& k_star, double delta,
               Eigen::VectorXd& out) {
  const auto n = gram.rows();
  Eigen::MatrixXd a = gram;
  a.diagonal().array() += static_cast<double>(n) * delta;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return false;
  out = llt.solve(k_star);
  if (!out.allFinite()) return false;
  const double residual = (a * out - k_star).lpNorm<Eigen::Infinity>();
  const double bound = kResidualTol * k_star.lpNorm<Eigen::Infinity>();
  return residual <= std::max(bound, 0.0);
}

}  // namespace

std::vector<double> kernel_abc_weights(const Eigen::MatrixXd& gram,
                                       const Eigen::VectorXd& k_star, double delta) {
  if (gram.rows() != gram.cols()) throw ConfigError("Gram matrix must be square");
  if (gram.rows() != k_star.size()) throw ConfigError("k_star length mismatch");
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ConfigError("regularization delta must be positive and finite");
  }
  if (!k_star.allFinite()) throw NumericalError("k_star has non-finite entries");

  double d = delta;
  for (int attempt = 0; attempt <= kMaxEscalations; ++attempt) {
    Eigen::VectorXd w;
    if (try_solve(gram, k_star, d, w)) {
      return std::vector<double>(w.data(), w.data() + w.size());
    }
    if (attempt < kMaxEscalations) {
      d *= 10.0;
      log_warn("kernel_abc_weights: factorization/residual failure, escalating delta to " +
               std::to_string(d));
    }
  }
  throw NumericalError("kernel_abc_weights: solve failed after delta escalation (n=" +
                       std::to_string(gram.rows()) + ", final delta=" + std::to_string(d) + ")");
}

PosteriorEmbedding embed_posterior(ParticleEnsemble ensemble, const SummaryVector& observed,
                                   const GaussianKernelSpec& k_y, double delta,
                                   const std::vector<SummaryVector>& simulated) {
  if (static_cast<int>(simulated.size()) != ensemble.size()) {
    throw ConfigError("embed_posterior needs one simulated summary per particle");
  }
  const auto n = static_cast<Eigen::Index>(simulated.size());
  Eigen::MatrixXd gram = gram_matrix(simulated, [&](const SummaryVector& a, const SummaryVector& b) {
    return gaussian_eval(a.values, b.values, k_y);
  });
  Eigen::VectorXd k_star(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k_star(i) = gaussian_eval(simulated[static_cast<std::size_t>(i)].values, observed.values, k_y);
  }
  if (k_star.lpNorm<Eigen::Infinity>() < 1e-12) {
    log_warn("embed_posterior: observed data is far from every simulation (low kernel signal)");
  }
  std::vector<double> weights = kernel_abc_weights(gram, k_star, delta);
  return PosteriorEmbedding{std::move(ensemble), std::move(weights)};
}

}  // namespace krsel

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "krsel/kernels.hpp"
#include "krsel/simulators_fwd.hpp"
#include "krsel/state.hpp"

namespace krsel {

// Estimated RKHS posterior mean: the particles together with the signed
// kernel ridge weights. Weights need not sum to one.
struct PosteriorEmbedding {
  ParticleEnsemble particles;
  std::vector<double> weights;

  int size() const { return particles.size(); }
};

// Solves (G + n*delta*I) w = k_star with a symmetric positive-definite
// factorization. If the factorization fails or the residual exceeds
// 1e-8 * ||k_star||_inf, delta is escalated tenfold up to three times
// (logged); beyond that a NumericalError carries the diagnostics.
std::vector<double> kernel_abc_weights(const Eigen::MatrixXd& gram,
                                       const Eigen::VectorXd& k_star, double delta);

// One Bayes update in the RKHS: Gram matrix and k(y*) under the summary
// kernel, then the ridge solve. Pairs the input particles with the weights.
PosteriorEmbedding embed_posterior(ParticleEnsemble ensemble, const SummaryVector& observed,
                                   const GaussianKernelSpec& k_y, double delta,
                                   const std::vector<SummaryVector>& simulated);

}  // namespace krsel

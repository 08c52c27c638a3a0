#include "krsel/oracles.hpp"

#include <cmath>

#include "krsel/errors.hpp"

namespace krsel {

namespace {

// Unnormalized Dirichlet(alpha, alpha) density on the simplex edge phi.
double dirichlet_edge_density(double phi, double alpha) {
  return std::pow(phi, alpha - 1.0) * std::pow(1.0 - phi, alpha - 1.0);
}

struct ToyTables {
  std::vector<double> lik1, lik2;  // p_m(y* | theta) over each grid
  double prior1 = 0.0, prior2 = 0.0;  // uniform grid masses
};

ToyTables tabulate(const MixtureGridToy& toy) {
  ToyTables t;
  const auto& m1 = toy.models[0];
  t.prior1 = 1.0 / static_cast<double>(m1.grid.size());
  t.lik1.reserve(m1.grid.size());
  for (double th : m1.grid) t.lik1.push_back(m1.density(toy.y_star, th));
  if (toy.models.size() == 2) {
    const auto& m2 = toy.models[1];
    t.prior2 = 1.0 / static_cast<double>(m2.grid.size());
    t.lik2.reserve(m2.grid.size());
    for (double th : m2.grid) t.lik2.push_back(m2.density(toy.y_star, th));
  }
  return t;
}

// Joint sum over both parameter grids of [phi L1_i + (1-phi) L2_j]^N.
double powered_mixture_sum(const ToyTables& t, double phi, int n_power) {
  double total = 0.0;
  for (double l1 : t.lik1) {
    for (double l2 : t.lik2) {
      total += std::pow(phi * l1 + (1.0 - phi) * l2, n_power) * t.prior1 * t.prior2;
    }
  }
  return total;
}

}  // namespace

double mixture_weight_identity_check(const MixtureGridToy& toy, int recursion,
                                     int simplex_eval_points) {
  if (recursion < 1) throw ConfigError("recursion index must be >= 1");
  if (toy.models.empty() || toy.models.size() > 2) {
    throw ConfigError("the grid toy supports one or two models");
  }
  for (const auto& m : toy.models) {
    if (m.grid.empty()) throw ConfigError("grid model has an empty parameter grid");
    if (m.grid.size() > 50) throw ConfigError("grid model exceeds 50 points");
  }

  const ToyTables tables = tabulate(toy);

  if (toy.models.size() == 1) {
    // Degenerate simplex: both sides are the normalized single-model density,
    // i.e. exactly one.
    double evidence_n = 0.0, evidence_n1 = 0.0;
    for (double l : tables.lik1) {
      evidence_n += std::pow(l, recursion) * tables.prior1;
      evidence_n1 += std::pow(l, recursion - 1) * tables.prior1;
    }
    const double lhs = 1.0;
    // C_N = evidence under the recursion-(N-1) posterior-as-prior.
    const double c_n = evidence_n / evidence_n1;
    double rhs_sum = 0.0;
    for (double l : tables.lik1) {
      rhs_sum += l * (std::pow(l, recursion - 1) * tables.prior1 / evidence_n1);
    }
    const double rhs = rhs_sum / c_n;
    return std::abs(lhs - rhs) / std::abs(lhs);
  }

  // Midpoint quadrature over the simplex edge (avoids the alpha < 1 endpoint
  // singularities). Both sides run over the same nodes, so the identity is
  // exercised exactly, independent of the rule's accuracy.
  const int q = toy.quadrature_nodes;
  std::vector<double> nodes(static_cast<std::size_t>(q));
  const double w = 1.0 / static_cast<double>(q);
  for (int i = 0; i < q; ++i) nodes[static_cast<std::size_t>(i)] = (i + 0.5) * w;

  auto z_of = [&](int n_power) {
    double z = 0.0;
    for (double phi : nodes) {
      z += w * dirichlet_edge_density(phi, toy.dirichlet_alpha) *
           powered_mixture_sum(tables, phi, n_power);
    }
    return z;
  };
  const double z_n = z_of(recursion);
  const double z_prev = recursion >= 2 ? z_of(recursion - 1) : 1.0;

  // Left side: the marginal density of phi under the N-times-updated
  // posterior, by direct integration of the joint over both grids.
  auto lhs_at = [&](double phi) {
    return dirichlet_edge_density(phi, toy.dirichlet_alpha) *
           powered_mixture_sum(tables, phi, recursion) / z_n;
  };

  // Right side: C_N^{-1} * prior marginal of phi * sum_m phi_m E_m(phi),
  // with every ingredient integrated independently.
  const double m1 = [&] {
    double e = 0.0;
    for (double l : tables.lik1) e += l * tables.prior1;
    return e;
  }();
  const double m2 = [&] {
    double e = 0.0;
    for (double l : tables.lik2) e += l * tables.prior2;
    return e;
  }();

  auto rhs_at = [&](double phi) {
    if (recursion == 1) {
      double c1 = 0.0;
      for (double node : nodes) {
        c1 += w * dirichlet_edge_density(node, toy.dirichlet_alpha) * (node * m1 + (1.0 - node) * m2);
      }
      return dirichlet_edge_density(phi, toy.dirichlet_alpha) * (phi * m1 + (1.0 - phi) * m2) / c1;
    }
    // Prior at this recursion is the previous posterior.
    const int prev = recursion - 1;
    auto prev_posterior_phi = [&](double p) {
      return dirichlet_edge_density(p, toy.dirichlet_alpha) * powered_mixture_sum(tables, p, prev) /
             z_prev;
    };
    // Conditional evidences under the previous posterior given phi.
    auto evidences = [&](double p, double& e1, double& e2) {
      const double joint_norm = powered_mixture_sum(tables, p, prev);
      // theta^1 conditional: marginalize theta^2 out of the joint.
      e1 = 0.0;
      for (std::size_t i = 0; i < tables.lik1.size(); ++i) {
        double marg = 0.0;
        for (double l2 : tables.lik2) {
          marg += std::pow(p * tables.lik1[i] + (1.0 - p) * l2, prev) * tables.prior1 *
                  tables.prior2;
        }
        e1 += tables.lik1[i] * (marg / joint_norm);
      }
      e2 = 0.0;
      for (std::size_t j = 0; j < tables.lik2.size(); ++j) {
        double marg = 0.0;
        for (double l1 : tables.lik1) {
          marg += std::pow(p * l1 + (1.0 - p) * tables.lik2[j], prev) * tables.prior1 *
                  tables.prior2;
        }
        e2 += tables.lik2[j] * (marg / joint_norm);
      }
    };
    double c_n = 0.0;
    for (double node : nodes) {
      double e1, e2;
      evidences(node, e1, e2);
      c_n += w * prev_posterior_phi(node) * (node * e1 + (1.0 - node) * e2);
    }
    double e1, e2;
    evidences(phi, e1, e2);
    return prev_posterior_phi(phi) * (phi * e1 + (1.0 - phi) * e2) / c_n;
  };

  double max_rel = 0.0;
  for (int i = 1; i <= simplex_eval_points; ++i) {
    const double phi = static_cast<double>(i) / (simplex_eval_points + 1);
    const double lhs = lhs_at(phi);
    const double rhs = rhs_at(phi);
    const double rel = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300);
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

std::vector<double> power_posterior_concentration(const PowerPosteriorToy& toy,
                                                  std::uint64_t seed) {
  RunConfig config;
  config.experiment = "gaussian_location";
  config.priors = PriorSpec{1.0, {{toy.prior}}};
  config.dirichlet_alpha = 1.0;  // K = 1, the simplex is a point
  config.n_per_iter = toy.n_per_iter;
  config.n_iters = toy.recursions;
  config.herding = toy.herding;
  config.hyper_grid.s_values = {toy.s};
  config.hyper_grid.delta_values = {toy.delta};
  config.seed = seed;
  config.trials = 1;

  ExperimentDef experiment = build_experiment(config);
  experiment.truth_params = {toy.truth};

  RngStream root(seed);
  RngStream obs_rng = root.substream(0x0b5ULL);
  const SummaryVector observed = experiment.sample_observed(obs_rng);
  double mle = 0.0;
  for (double v : observed.values) mle += v;
  mle /= static_cast<double>(observed.dim());

  RngStream run_rng = root.substream(0x917ULL);
  const TrialResult result = run_kr_abc(config, experiment, observed, run_rng);

  std::vector<double> distance;
  distance.reserve(result.per_iteration_log.size());
  for (const auto& state : result.per_iteration_log) {
    distance.push_back(std::abs(state.params[0].theta[0] - mle));
  }
  return distance;
}

}  // namespace krsel

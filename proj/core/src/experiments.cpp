#include "krsel/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "krsel/errors.hpp"

namespace krsel {

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    x[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / (n - 1);
  }
  return x;
}

ModelSpec make_poly_model(int order, std::vector<double> design, double noise_sd, bool arctan) {
  ModelSpec spec;
  spec.name = "poly" + std::to_string(order);
  spec.dim = order + 1;
  spec.nonneg_mask.assign(static_cast<std::size_t>(spec.dim), 0);
  spec.simulator = [order, design = std::move(design), noise_sd, arctan](
                       const ParamVector& theta, RngStream& noise) {
    SummaryVector y = simulate_polynomial(order, theta, design, noise_sd, noise);
    return arctan ? arctan_transform(y) : y;
  };
  return spec;
}

ModelSpec make_ode_model_spec(OdeModelId id, const OdeSimOptions& opts) {
  ModelSpec spec;
  spec.name = ode_model_name(id);
  spec.dim = ode_full_param_dim(id, opts);
  spec.nonneg_mask.assign(static_cast<std::size_t>(spec.dim), 1);  // rates and populations
  spec.simulator = [id, opts](const ParamVector& theta, RngStream& noise) {
    return simulate_ode_model(id, theta, noise, opts);
  };
  return spec;
}

std::vector<Box> uniform_boxes(int dim, double lo, double hi) {
  return std::vector<Box>(static_cast<std::size_t>(dim), Box{lo, hi});
}

struct PolyLayout {
  std::vector<int> orders;
  double x_lo, x_hi;
  int n_points;
  double noise_sd;
  double box_lo, box_hi;
  double holdout_lo = 5.0, holdout_hi = 6.0;
  int holdout_points = 5;
};

ExperimentDef build_poly(const std::string& name, const PolyLayout& p, int truth_model,
                         double truth_coeff, double alpha, bool arctan) {
  ExperimentDef def;
  def.name = name;
  def.default_arctan = false;
  const auto design = linspace(p.x_lo, p.x_hi, p.n_points);
  const auto holdout = linspace(p.holdout_lo, p.holdout_hi, p.holdout_points);
  def.priors.dirichlet_alpha = alpha;
  for (int order : p.orders) {
    def.model_names.push_back("poly" + std::to_string(order));
    def.models.push_back(make_poly_model(order, design, p.noise_sd, arctan));
    def.holdout_models.push_back(make_poly_model(order, holdout, p.noise_sd, arctan));
    def.priors.boxes.push_back(uniform_boxes(order + 1, p.box_lo, p.box_hi));
    for (int j = 0; j <= order; ++j) def.nonneg_mask.push_back(0);
  }
  def.truth_model = truth_model;
  def.truth_params.assign(
      static_cast<std::size_t>(p.orders[static_cast<std::size_t>(truth_model)] + 1), truth_coeff);
  def.summary_dim = p.n_points;
  def.holdout_dim = p.holdout_points;
  return def;
}

struct OdeLayout {
  std::vector<OdeModelId> ids;
  int t_begin = 0;
  int t_count = 0;
  int holdout_t_begin = 0;
  int holdout_t_count = 0;
  double rate_lo = 0.0, rate_hi = 1.0;
  bool init_from_params = false;
  double init_lo = 0.0, init_hi = 0.0;
};

ExperimentDef build_ode(const std::string& name, const OdeLayout& o, int truth_model,
                        std::vector<double> truth_params, double alpha, bool arctan,
                        bool default_arctan) {
  ExperimentDef def;
  def.name = name;
  def.default_arctan = default_arctan;
  def.priors.dirichlet_alpha = alpha;
  int obs_per_t = 0;
  for (OdeModelId id : o.ids) {
    OdeSimOptions opts;
    opts.t_begin = o.t_begin;
    opts.t_count = o.t_count;
    opts.noise_sd = 1.0;
    opts.arctan = arctan;
    opts.init_from_params = o.init_from_params;
    OdeSimOptions holdout_opts = opts;
    holdout_opts.t_begin = o.holdout_t_begin;
    holdout_opts.t_count = o.holdout_t_count;

    def.model_names.push_back(ode_model_name(id));
    def.models.push_back(make_ode_model_spec(id, opts));
    def.holdout_models.push_back(make_ode_model_spec(id, holdout_opts));

    std::vector<Box> boxes = uniform_boxes(ode_param_dim(id), o.rate_lo, o.rate_hi);
    if (o.init_from_params) {
      const auto init_boxes = uniform_boxes(ode_state_dim(id), o.init_lo, o.init_hi);
      boxes.insert(boxes.end(), init_boxes.begin(), init_boxes.end());
    }
    def.priors.boxes.push_back(std::move(boxes));
    for (int j = 0; j < ode_full_param_dim(id, opts); ++j) def.nonneg_mask.push_back(1);
    obs_per_t = static_cast<int>(ode_observed_compartments(id).size());
  }
  def.truth_model = truth_model;
  def.truth_params = std::move(truth_params);
  def.summary_dim = o.t_count * obs_per_t;
  def.holdout_dim = o.holdout_t_count * obs_per_t;
  return def;
}

ExperimentDef build_gaussian_location(const std::string& name, Box prior_box, double alpha) {
  ExperimentDef def;
  def.name = name;
  def.default_arctan = false;
  constexpr int n_obs = 10;
  ModelSpec model;
  model.name = "gauss_loc";
  model.dim = 1;
  model.nonneg_mask = {0};
  model.simulator = [](const ParamVector& theta, RngStream& noise) {
    SummaryVector y;
    y.values.reserve(n_obs);
    for (int i = 0; i < n_obs; ++i) y.values.push_back(theta.theta[0] + noise.normal());
    return y;
  };
  def.model_names = {"gauss_loc"};
  def.models = {std::move(model)};
  def.priors.dirichlet_alpha = alpha;
  def.priors.boxes = {{prior_box}};
  def.truth_model = 0;
  def.truth_params = {3.0};
  def.nonneg_mask = {0};
  def.summary_dim = n_obs;
  def.holdout_dim = 0;
  return def;
}

}  // namespace

SummaryVector ExperimentDef::sample_observed(RngStream& rng) const {
  ParamVector truth{truth_params, truth_model};
  return models[static_cast<std::size_t>(truth_model)].simulator(truth, rng);
}

SummaryVector ExperimentDef::sample_observed_holdout(RngStream& rng) const {
  if (holdout_models.empty() || holdout_dim == 0) {
    throw ConfigError("experiment " + name + " has no holdout design");
  }
  ParamVector truth{truth_params, truth_model};
  return holdout_models[static_cast<std::size_t>(truth_model)].simulator(truth, rng);
}

std::vector<std::string> experiment_names() {
  return {
      "poly_appropriate_3",   "poly_appropriate_4",      "poly_misspecified_3",
      "poly_misspecified_4",  "poly_3rd_vs_10th",        "poly_3rd_vs_10th_truth10",
      "predator_prey_1",      "predator_prey_2",         "predator_prey_difficult_1",
      "predator_prey_difficult_2", "epidemics_1",        "epidemics_2",
      "epidemics_3",          "epidemics_difficult_2",   "epidemics_difficult_3",
      "gaussian_location",    "gaussian_location_misspecified",
  };
}

ExperimentDef make_experiment(const std::string& name, double dirichlet_alpha,
                              std::optional<bool> arctan) {
  // The arctan flag must be known before simulators are built.
  auto resolve_arctan = [&](bool def_on) { return arctan.value_or(def_on); };

  const PolyLayout poly_main{{3, 4}, -1.0, 5.0, 25, 3.0, 30.0, 50.0};
  const PolyLayout poly_mis{{3, 4}, -1.0, 5.0, 25, 3.0, 0.0, 30.0};
  const PolyLayout poly_toy{{3, 10}, -1.0, 2.0, 20, 1.0, -100.0, 100.0};

  if (name == "poly_appropriate_3") {
    return build_poly(name, poly_main, 0, 40.0, dirichlet_alpha, resolve_arctan(false));
  }
  if (name == "poly_appropriate_4") {
    return build_poly(name, poly_main, 1, 40.0, dirichlet_alpha, resolve_arctan(false));
  }
  if (name == "poly_misspecified_3") {
    return build_poly(name, poly_mis, 0, 40.0, dirichlet_alpha, resolve_arctan(false));
  }
  if (name == "poly_misspecified_4") {
    return build_poly(name, poly_mis, 1, 40.0, dirichlet_alpha, resolve_arctan(false));
  }
  if (name == "poly_3rd_vs_10th") {
    return build_poly(name, poly_toy, 0, 4.0, dirichlet_alpha, resolve_arctan(false));
  }
  if (name == "poly_3rd_vs_10th_truth10") {
    return build_poly(name, poly_toy, 1, 4.0, dirichlet_alpha, resolve_arctan(false));
  }

  if (name == "predator_prey_1" || name == "predator_prey_2") {
    OdeLayout o;
    o.ids = {OdeModelId::lotka_volterra, OdeModelId::bazykin};
    o.t_begin = 0;
    o.t_count = 20;
    o.holdout_t_begin = 21;
    o.holdout_t_count = 5;
    o.rate_lo = 0.0;
    o.rate_hi = 2.0;
    const bool truth2 = (name == "predator_prey_2");
    std::vector<double> truth = truth2 ? std::vector<double>{1.0, 0.1, 1.5, 0.75, 0.01, 0.01}
                                       : std::vector<double>{1.0, 0.1, 1.5, 0.75};
    return build_ode(name, o, truth2 ? 1 : 0, std::move(truth), dirichlet_alpha,
                     resolve_arctan(false), false);
  }
  if (name == "predator_prey_difficult_1" || name == "predator_prey_difficult_2") {
    OdeLayout o;
    o.ids = {OdeModelId::lotka_volterra, OdeModelId::bazykin};
    o.t_begin = 10;  // the first ten observations are dropped
    o.t_count = 20;
    o.holdout_t_begin = 31;
    o.holdout_t_count = 5;
    o.rate_lo = 0.0;
    o.rate_hi = 2.0;
    o.init_from_params = true;
    o.init_lo = 0.0;
    o.init_hi = 2000.0;
    const bool truth2 = (name == "predator_prey_difficult_2");
    std::vector<double> truth = truth2
                                    ? std::vector<double>{1.0, 0.1, 1.5, 0.75, 0.01, 0.01, 10.0, 5.0}
                                    : std::vector<double>{1.0, 0.1, 1.5, 0.75, 10.0, 5.0};
    return build_ode(name, o, truth2 ? 1 : 0, std::move(truth), dirichlet_alpha,
                     resolve_arctan(true), true);
  }

  if (name == "epidemics_1" || name == "epidemics_2" || name == "epidemics_3") {
    OdeLayout o;
    o.ids = {OdeModelId::sir, OdeModelId::sir_latent, OdeModelId::sir_reinfect};
    o.t_begin = 0;
    o.t_count = 70;
    o.holdout_t_begin = 71;
    o.holdout_t_count = 15;
    o.rate_lo = 0.0;
    o.rate_hi = 1.0;
    int truth_model = 0;
    std::vector<double> truth = {0.5, 0.001, 0.01, 0.02};
    if (name == "epidemics_2") {
      truth_model = 1;
      truth = {0.5, 0.001, 0.01, 0.02, 0.1};
    } else if (name == "epidemics_3") {
      truth_model = 2;
      truth = {0.5, 0.001, 0.01, 0.02, 0.1};
    }
    return build_ode(name, o, truth_model, std::move(truth), dirichlet_alpha,
                     resolve_arctan(false), false);
  }
  if (name == "epidemics_difficult_2" || name == "epidemics_difficult_3") {
    OdeLayout o;
    o.ids = {OdeModelId::sir_latent, OdeModelId::sir_reinfect};
    o.t_begin = 10;
    o.t_count = 70;
    o.holdout_t_begin = 81;
    o.holdout_t_count = 15;
    o.rate_lo = 0.0;
    o.rate_hi = 1.0;
    o.init_from_params = true;
    o.init_lo = 0.0;
    o.init_hi = 500.0;
    const bool truth3 = (name == "epidemics_difficult_3");
    // Trailing entries are the true initial compartments.
    std::vector<double> truth = truth3
                                    ? std::vector<double>{0.5, 0.001, 0.01, 0.02, 0.1, 20, 50, 0}
                                    : std::vector<double>{0.5, 0.001, 0.01, 0.02, 0.1, 20, 0, 50, 0};
    return build_ode(name, o, truth3 ? 1 : 0, std::move(truth), dirichlet_alpha,
                     resolve_arctan(false), false);
  }

  if (name == "gaussian_location") {
    return build_gaussian_location(name, Box{0.0, 6.0}, dirichlet_alpha);
  }
  if (name == "gaussian_location_misspecified") {
    return build_gaussian_location(name, Box{-10.0, 0.0}, dirichlet_alpha);
  }

  throw ConfigError("unknown experiment '" + name + "'");
}

}  // namespace krsel

#include "krsel/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "krsel/errors.hpp"

namespace krsel {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

PriorSpec parse_priors(const json& obj, double dirichlet_alpha) {
  require_keys(obj, {"dirichlet_alpha", "boxes"}, "priors");
  PriorSpec prior;
  prior.dirichlet_alpha = obj.value("dirichlet_alpha", dirichlet_alpha);
  if (!obj.contains("boxes")) throw ConfigError("priors needs a boxes array");
  for (const auto& model_boxes : obj.at("boxes")) {
    std::vector<Box> boxes;
    for (const auto& b : model_boxes) {
      if (!b.is_array() || b.size() != 2) {
        throw ConfigError("each prior box must be a [lower, upper] pair");
      }
      boxes.push_back(Box{b.at(0).get<double>(), b.at(1).get<double>()});
    }
    prior.boxes.push_back(std::move(boxes));
  }
  return prior;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
  require_keys(doc,
               {"experiment", "models", "priors", "dirichlet_alpha", "n_per_iter", "n_iters",
                "herding", "hyper_grid", "seed", "trials", "transforms", "output_dir",
                "baselines"},
               "config");

  RunConfig cfg;
  try {
    if (!doc.contains("experiment")) throw ConfigError("config needs an experiment name");
    cfg.experiment = doc.at("experiment").get<std::string>();
    if (doc.contains("models")) {
      cfg.models = doc.at("models").get<std::vector<std::string>>();
    }
    cfg.dirichlet_alpha = doc.value("dirichlet_alpha", cfg.dirichlet_alpha);
    if (doc.contains("priors")) cfg.priors = parse_priors(doc.at("priors"), cfg.dirichlet_alpha);
    cfg.n_per_iter = doc.value("n_per_iter", cfg.n_per_iter);
    cfg.n_iters = doc.value("n_iters", cfg.n_iters);
    if (doc.contains("herding")) {
      const json& h = doc.at("herding");
      require_keys(h, {"pool_multiplier", "perturbation_scale", "fresh_prior_fraction"},
                   "herding");
      cfg.herding.pool_multiplier = h.value("pool_multiplier", cfg.herding.pool_multiplier);
      cfg.herding.perturbation_scale =
          h.value("perturbation_scale", cfg.herding.perturbation_scale);
      cfg.herding.fresh_prior_fraction =
          h.value("fresh_prior_fraction", cfg.herding.fresh_prior_fraction);
    }
    if (doc.contains("hyper_grid")) {
      const json& g = doc.at("hyper_grid");
      require_keys(g, {"s", "delta"}, "hyper_grid");
      if (g.contains("s")) cfg.hyper_grid.s_values = g.at("s").get<std::vector<double>>();
      if (g.contains("delta")) {
        cfg.hyper_grid.delta_values = g.at("delta").get<std::vector<double>>();
      }
    }
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.trials = doc.value("trials", cfg.trials);
    if (doc.contains("transforms")) {
      const json& t = doc.at("transforms");
      require_keys(t, {"arctan"}, "transforms");
      if (t.contains("arctan")) cfg.transforms.arctan = t.at("arctan").get<bool>();
    }
    cfg.output_dir = doc.value("output_dir", cfg.output_dir);
    if (doc.contains("baselines")) {
      const json& b = doc.at("baselines");
      require_keys(b, {"n_sims", "knn_k", "knn_candidates", "population", "generations",
                       "perturb_sd"},
                   "baselines");
      cfg.baselines.n_sims = b.value("n_sims", cfg.baselines.n_sims);
      cfg.baselines.knn_k = b.value("knn_k", cfg.baselines.knn_k);
      if (b.contains("knn_candidates")) {
        cfg.baselines.knn_candidates = b.at("knn_candidates").get<std::vector<int>>();
      }
      cfg.baselines.population = b.value("population", cfg.baselines.population);
      cfg.baselines.generations = b.value("generations", cfg.baselines.generations);
      cfg.baselines.perturb_sd = b.value("perturb_sd", cfg.baselines.perturb_sd);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

}  // namespace krsel

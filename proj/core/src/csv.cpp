#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "krsel/errors.hpp"
#include "krsel/io.hpp"
#include "krsel/state.hpp"

namespace krsel {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (char c : raw) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << csv_field(fields[i]);
  }
  os << '\n';
}

void write_ensemble_csv(std::ostream& os, const ParticleEnsemble& ensemble) {
  if (ensemble.states.empty()) throw ConfigError("cannot serialize an empty ensemble");
  const StateLayout layout = layout_of(ensemble.states.front());
  write_csv_row(os, flat_coordinate_names(layout));
  for (const auto& state : ensemble.states) {
    const std::vector<double> flat = flatten(state);
    std::vector<std::string> fields;
    fields.reserve(flat.size());
    for (double v : flat) fields.push_back(format_double(v));
    write_csv_row(os, fields);
  }
}

namespace {

void write_summary_csv(const std::filesystem::path& path, const SummaryVector& y) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  write_csv_row(os, {"index", "value"});
  for (std::size_t i = 0; i < y.values.size(); ++i) {
    write_csv_row(os, {std::to_string(i), format_double(y.values[i])});
  }
}

void write_trials_csv(const std::filesystem::path& path, const MethodRun& run, int k) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  std::vector<std::string> header = {"seed", "selected_model"};
  for (int m = 0; m < k; ++m) header.push_back("coef_" + std::to_string(m));
  header.push_back("data_error");
  header.push_back("extrapolation_error");
  write_csv_row(os, header);
  for (const auto& row : run.rows) {
    std::vector<std::string> fields = {std::to_string(row.seed),
                                       std::to_string(row.selected_model)};
    for (double c : row.coefficients) fields.push_back(format_double(c));
    fields.push_back(format_double(row.data_error));
    fields.push_back(format_double(row.extrapolation_error));
    write_csv_row(os, fields);
  }
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<std::vector<double>>& trajectory, int k) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  std::vector<std::string> header = {"iteration"};
  for (int m = 0; m < k; ++m) header.push_back("coef_" + std::to_string(m));
  write_csv_row(os, header);
  for (std::size_t it = 0; it < trajectory.size(); ++it) {
    std::vector<std::string> fields = {std::to_string(it + 1)};
    for (double c : trajectory[it]) fields.push_back(format_double(c));
    write_csv_row(os, fields);
  }
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MethodRun>& runs) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path.string() + " for writing");
  write_csv_row(os, {"method", "model_error", "mean_data_error", "mean_extrapolation_error",
                     "n_trials"});
  for (const auto& run : runs) {
    write_csv_row(os, {method_name(run.method), format_double(run.metrics.model_error),
                       format_double(run.metrics.mean_data_error),
                       format_double(run.metrics.mean_extrapolation_error),
                       std::to_string(run.metrics.n_trials)});
  }
}

}  // namespace

std::vector<MethodRun> run_and_write(const RunConfig& config, const std::vector<Method>& methods) {
  if (methods.empty()) throw ConfigError("no methods requested");
  const ExperimentDef experiment = build_experiment(config);
  const std::filesystem::path out_dir(config.output_dir);
  std::filesystem::create_directories(out_dir);

  for (int trial = 0; trial < config.trials; ++trial) {
    write_summary_csv(out_dir / ("observed_" + std::to_string(trial) + ".csv"),
                      observed_for_trial(config, experiment, trial));
    if (experiment.holdout_dim > 0) {
      write_summary_csv(out_dir / ("observed_holdout_" + std::to_string(trial) + ".csv"),
                        observed_holdout_for_trial(config, experiment, trial));
    }
  }

  const int k = static_cast<int>(experiment.models.size());
  std::vector<MethodRun> runs;
  runs.reserve(methods.size());
  for (Method method : methods) {
    runs.push_back(run_trials(config, experiment, method));
    const MethodRun& run = runs.back();
    const std::string trials_name =
        methods.size() == 1 ? "trials.csv" : ("trials_" + method_name(method) + ".csv");
    write_trials_csv(out_dir / trials_name, run, k);
    if (method == Method::krsel) {
      for (std::size_t t = 0; t < run.trajectories.size(); ++t) {
        write_trajectory_csv(out_dir / ("trajectory_" + std::to_string(t) + ".csv"),
                             run.trajectories[t], k);
      }
    }
  }
  write_metrics_csv(out_dir / "metrics.csv", runs);
  return runs;
}

}  // namespace krsel

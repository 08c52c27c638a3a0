#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "krsel/harness.hpp"

namespace krsel {

// Shortest round-trip decimal representation ('.' separator, locale-free).
std::string format_double(double v);

// RFC-4180 field quoting: quotes the field when it contains a comma, quote
// or newline, doubling embedded quotes.
std::string csv_field(const std::string& raw);

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

// One flattened state per row, header naming each coordinate.
void write_ensemble_csv(std::ostream& os, const ParticleEnsemble& ensemble);

// Runs the requested methods and persists results under config.output_dir:
//   trials.csv (or trials_<method>.csv when several methods run),
//   trajectory_<trial>.csv for the proposed method, metrics.csv,
//   observed_<trial>.csv (and observed_holdout_<trial>.csv when defined).
// Returns the method runs in the order requested.
std::vector<MethodRun> run_and_write(const RunConfig& config, const std::vector<Method>& methods);

}  // namespace krsel

#pragma once

#include <string>

#include "krsel/harness.hpp"

namespace krsel {

// Parses a RunConfig from a JSON document / file. Unknown keys are rejected.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

}  // namespace krsel

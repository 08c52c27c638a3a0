#pragma once

#include <functional>
#include <string>

namespace krsel {

// Warnings (low kernel signal, delta escalation, ...) go through a single
// sink so tests and embedding applications can capture or silence them.
using LogSink = std::function<void(const std::string&)>;

void set_log_sink(LogSink sink);  // empty sink restores the stderr default
void log_warn(const std::string& message);

}  // namespace krsel

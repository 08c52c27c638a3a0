#include "krsel/log.hpp"

#include <iostream>
#include <mutex>

namespace krsel {

namespace {
std::mutex g_mutex;
LogSink g_sink;
}  // namespace

void set_log_sink(LogSink sink) {
  std::lock_guard lock(g_mutex);
  g_sink = std::move(sink);
}

void log_warn(const std::string& message) {
  std::lock_guard lock(g_mutex);
  if (g_sink) {
    g_sink(message);
  } else {
    std::cerr << "[krsel] warning: " << message << "\n";
  }
}

}  // namespace krsel

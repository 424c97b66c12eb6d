#include "gchsh/log.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace gchsh {

namespace {

void stderr_sink(LogLevel level, std::string_view msg) {
  std::cerr << (level == LogLevel::warning ? "warning: " : "") << msg << '\n';
}

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

LogSink& sink() {
  static LogSink s = stderr_sink;
  return s;
}

}  // namespace

void set_log_sink(LogSink s) {
  std::lock_guard lock(sink_mutex());
  sink() = std::move(s);
}

void reset_log_sink() { set_log_sink(stderr_sink); }

void log(LogLevel level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (sink()) sink()(level, message);
}

}  // namespace gchsh

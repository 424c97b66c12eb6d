#pragma once

#include <functional>
#include <string_view>

namespace gchsh {

enum class LogLevel { info, warning };

using LogSink = std::function<void(LogLevel, std::string_view)>;

/// Replaces the process-wide sink (default: standard error). Passing an empty
/// function silences logging. Calls to the sink are serialized.
void set_log_sink(LogSink sink);
/// Restores the standard-error sink.
void reset_log_sink();
void log(LogLevel level, std::string_view message);

inline void log_info(std::string_view message) { log(LogLevel::info, message); }
inline void log_warning(std::string_view message) { log(LogLevel::warning, message); }

}  // namespace gchsh

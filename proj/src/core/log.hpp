#pragma once

#include <functional>
#include <string>

namespace hesselm {

using LogHandler = std::function<void(const std::string&)>;

// Process-wide sink for info/warning lines. Defaults to stderr; the C API and
// tests install their own handlers. Thread-safe.
void set_log_handler(LogHandler handler);
void log_info(const std::string& message);
void log_warning(const std::string& message);

}  // namespace hesselm

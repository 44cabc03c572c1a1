#include "core/log.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace hesselm {

namespace {

std::mutex g_mutex;
LogHandler g_handler;

void emit(const std::string& line) {
  std::lock_guard<std::mutex> lock(g_mutex);
  if (g_handler) {
    g_handler(line);
  } else {
    std::cerr << line << '\n';
  }
}

}  // namespace

void set_log_handler(LogHandler handler) {
  std::lock_guard<std::mutex> lock(g_mutex);
  g_handler = std::move(handler);
}

void log_info(const std::string& message) { emit(message); }

void log_warning(const std::string& message) { emit("warning: " + message); }

}  // namespace hesselm

#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <string_view>

namespace simrag {

using LogSink = std::function<void(std::string_view)>;

namespace detail {
inline std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}
inline LogSink& warning_sink() {
  static LogSink sink = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  return sink;
}
}  // namespace detail

/// Replace the warning sink (stderr by default). Returns the previous one.
inline LogSink set_warning_sink(LogSink sink) {
  std::lock_guard lock(detail::log_mutex());
  auto prev = std::move(detail::warning_sink());
  detail::warning_sink() = std::move(sink);
  return prev;
}

inline void warn(std::string_view msg) {
  std::lock_guard lock(detail::log_mutex());
  if (detail::warning_sink()) detail::warning_sink()(msg);
}

}  // namespace simrag

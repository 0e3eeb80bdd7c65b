#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>

namespace dichotomy {

/// Worker count: DICHOTOMY_LAB_THREADS if it holds a positive integer,
/// otherwise the available hardware parallelism (at least 1).
[[nodiscard]] std::size_t worker_count();

/// Parses a thread-count override; nullopt unless a positive integer.
[[nodiscard]] std::optional<std::size_t> parse_thread_count(std::string_view text);

/// Runs body(i) for i in [0, n) on at most `workers` threads. Indices are
/// claimed dynamically, so callers must write results by index. The first
/// exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t workers = 0);

}  // namespace dichotomy

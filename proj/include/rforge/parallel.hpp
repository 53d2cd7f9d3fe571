#pragma once

#include <cstddef>
#include <functional>

namespace rforge::parallel {

/// Worker count for internal loops: the override if set, else RFORGE_THREADS,
/// else std::thread::hardware_concurrency(). Always at least 1.
std::size_t thread_count();

/// Overrides the worker count for this process; 0 restores the default.
void set_thread_limit(std::size_t limit);

/// Splits [0, count) into blocks of `block` indices and runs body(begin, end)
/// on each. Block boundaries depend only on count and block, never on the
/// thread count, so per-index results are identical for any parallelism.
void for_blocks(std::ptrdiff_t count, std::ptrdiff_t block,
                const std::function<void(std::ptrdiff_t, std::ptrdiff_t)>& body);

}  // namespace rforge::parallel

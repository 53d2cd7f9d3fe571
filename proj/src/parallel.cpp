#include "rforge/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace rforge::parallel {
namespace {

std::atomic<std::size_t> g_override{0};

std::size_t from_environment() {
  if (const char* env = std::getenv("RFORGE_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      // unparsable values fall through to the hardware default
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

std::size_t thread_count() {
  const std::size_t o = g_override.load();
  return o > 0 ? o : from_environment();
}

void set_thread_limit(std::size_t limit) { g_override.store(limit); }

void for_blocks(std::ptrdiff_t count, std::ptrdiff_t block,
                const std::function<void(std::ptrdiff_t, std::ptrdiff_t)>& body) {
  if (count <= 0) return;
  block = std::max<std::ptrdiff_t>(block, 1);
  const std::ptrdiff_t blocks = (count + block - 1) / block;
  const auto workers =
      static_cast<std::ptrdiff_t>(std::min<std::size_t>(thread_count(), blocks));

  if (workers <= 1) {
    for (std::ptrdiff_t b = 0; b < blocks; ++b)
      body(b * block, std::min(count, (b + 1) * block));
    return;
  }

  std::atomic<std::ptrdiff_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::ptrdiff_t b = next.fetch_add(1);
      if (b >= blocks) return;
      try {
        body(b * block, std::min(count, (b + 1) * block));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (std::ptrdiff_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace rforge::parallel

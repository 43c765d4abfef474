#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace lgrav {

// LGRAV_THREADS overrides `requested`; 0 means hardware concurrency.
inline int resolve_threads(int requested) {
  if (const char* env = std::getenv("LGRAV_THREADS")) requested = std::atoi(env);
  if (requested <= 0) requested = static_cast<int>(std::thread::hardware_concurrency());
  return requested > 0 ? requested : 1;
}

// LGRAV_SEED overrides `seed`.
inline std::uint64_t resolve_seed(std::uint64_t seed) {
  if (const char* env = std::getenv("LGRAV_SEED")) return std::stoull(env);
  return seed;
}

// Calls f(i) for i in [0, n) on up to `threads` workers. Items must write to disjoint
// slots; callers reduce the slots in index order, so results do not depend on `threads`.
// The first exception thrown by an item is rethrown after all workers stop.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  if (n == 0) return;
  const std::size_t workers = std::min<std::size_t>(n, threads > 0 ? static_cast<std::size_t>(threads) : 1);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t k = 1; k < workers; ++k) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace lgrav

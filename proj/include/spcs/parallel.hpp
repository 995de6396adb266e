#ifndef SPCS_PARALLEL_HPP_
#define SPCS_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spcs {

/// Number of workers to use for a request of `threads` (0 = hardware).
inline int resolve_threads(int threads) {
  if (threads > 0) return threads;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

/// Calls fn(i, worker) for every i in [0, count). Workers pull indices from a
/// shared counter, so the assignment of indices to workers varies between
/// runs; fn must write only to slots owned by i (or by worker) for the result
/// to be deterministic. The first exception thrown by fn is rethrown.
template <typename Fn>
void parallel_for(std::uint64_t count, int threads, Fn&& fn) {
  const int workers =
      static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(resolve_threads(threads)),
                                               std::max<std::uint64_t>(count, 1)));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i, 0);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&](int worker) {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i, worker);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body, w);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace spcs

#endif  // SPCS_PARALLEL_HPP_

#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace specres {

/// Fixed-size fork-join helper. Tasks are indexed 0..n-1 and must write their
/// results into per-index slots, so the outcome is independent of scheduling.
class WorkerPool {
 public:
  explicit WorkerPool(unsigned threads = 1)
      : threads_(threads == 0 ? std::thread::hardware_concurrency() : threads) {
    if (threads_ == 0) threads_ = 1;
  }

  unsigned size() const { return threads_; }

  /// Runs f(i) for i in [0, n). Exceptions are rethrown on the caller thread
  /// (first one wins).
  void for_each_index(std::size_t n, const std::function<void(std::size_t)>& f) const {
    if (threads_ <= 1 || n <= 1) {
      for (std::size_t i = 0; i < n; ++i) f(i);
      return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> crew;
    const unsigned m = std::min<std::size_t>(threads_, n);
    crew.reserve(m);
    for (unsigned t = 0; t < m; ++t) crew.emplace_back(worker);
    for (auto& th : crew) th.join();
    if (error) std::rethrow_exception(error);
  }

 private:
  unsigned threads_;
};

}  // namespace specres

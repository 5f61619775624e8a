#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace simm {

/// Fixed-size worker pool running static-partitioned loops. The caller's
/// thread takes the first chunk; `for_each_range` returns after every chunk
/// finished, so consecutive calls act as phase barriers.
///
/// Loops are always split into `workers()` chunks, but at most one OS
/// thread per hardware core runs them; oversubscribing a small machine only
/// adds wake-up latency.
///
/// Callers must keep iterations independent: results may not depend on how
/// the range is split.
class ThreadPool {
 public:
  /// `max_threads == 0` means one per hardware core.
  explicit ThreadPool(std::size_t workers = 1, std::size_t max_threads = 0);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  std::size_t workers() const noexcept { return parts_; }
  std::size_t threads() const noexcept { return helpers_.size() + 1; }

  void for_each_range(std::size_t count,
                      const std::function<void(std::size_t begin, std::size_t end)>& body);

  template <typename F>
  void for_each(std::size_t count, F&& f) {
    for_each_range(count, [&f](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) f(i);
    });
  }

 private:
  void helper_loop(std::size_t slot);
  void run_chunks(std::size_t slot, std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body) const;

  std::size_t parts_ = 1;
  std::vector<std::thread> helpers_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t, std::size_t)>* body_ = nullptr;
  std::size_t count_ = 0;
  std::size_t generation_ = 0;
  std::size_t pending_ = 0;
  bool stopping_ = false;
  std::exception_ptr error_;
};

}  // namespace simm

#include "simm/parallel.hpp"

#include <algorithm>

namespace simm {

namespace {

std::pair<std::size_t, std::size_t> chunk(std::size_t count, std::size_t parts, std::size_t k) {
  const std::size_t base = count / parts;
  const std::size_t extra = count % parts;
  const std::size_t begin = k * base + std::min(k, extra);
  return {begin, begin + base + (k < extra ? 1 : 0)};
}

}  // namespace

ThreadPool::ThreadPool(std::size_t workers, std::size_t max_threads) {
  parts_ = std::max<std::size_t>(workers, 1);
  if (max_threads == 0) max_threads = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t threads = std::min(parts_, max_threads);
  helpers_.reserve(threads - 1);
  for (std::size_t slot = 1; slot < threads; ++slot) {
    helpers_.emplace_back([this, slot] { helper_loop(slot); });
  }
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  wake_.notify_all();
  for (auto& t : helpers_) t.join();
}

void ThreadPool::run_chunks(std::size_t slot, std::size_t count,
                            const std::function<void(std::size_t, std::size_t)>& body) const {
  for (std::size_t k = slot; k < parts_; k += threads()) {
    auto [begin, end] = chunk(count, parts_, k);
    if (begin < end) body(begin, end);
  }
}

void ThreadPool::for_each_range(std::size_t count,
                                const std::function<void(std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  if (helpers_.empty()) {
    run_chunks(0, count, body);
    return;
  }
  {
    std::lock_guard lock(mutex_);
    body_ = &body;
    count_ = count;
    pending_ = helpers_.size();
    error_ = nullptr;
    ++generation_;
  }
  wake_.notify_all();

  std::exception_ptr local;
  try {
    run_chunks(0, count, body);
  } catch (...) {
    local = std::current_exception();
  }

  std::unique_lock lock(mutex_);
  done_.wait(lock, [this] { return pending_ == 0; });
  body_ = nullptr;
  if (local) std::rethrow_exception(local);
  if (error_) std::rethrow_exception(error_);
}

void ThreadPool::helper_loop(std::size_t slot) {
  std::size_t seen = 0;
  for (;;) {
    const std::function<void(std::size_t, std::size_t)>* body;
    std::size_t count;
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return stopping_ || generation_ != seen; });
      if (stopping_) return;
      seen = generation_;
      body = body_;
      count = count_;
    }
    std::exception_ptr failure;
    try {
      run_chunks(slot, count, *body);
    } catch (...) {
      failure = std::current_exception();
    }
    {
      std::lock_guard lock(mutex_);
      if (failure && !error_) error_ = failure;
      if (--pending_ == 0) done_.notify_one();
    }
  }
}

}  // namespace simm

#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace pnms {

/// Fixed-size pool of persistent workers. `run(fn)` calls fn(worker_id) once
/// per worker id in [0, size()) and returns after all calls finish; the
/// calling thread acts as worker 0. Exceptions thrown by fn are rethrown.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const noexcept { return threads_.size() + 1; }

  void run(const std::function<void(std::size_t)>& fn);

 private:
  void worker_loop(std::size_t id);

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::size_t generation_ = 0;
  std::size_t pending_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

/// Contiguous block [first, second) of `total` items owned by `part` of `parts`.
constexpr std::pair<std::size_t, std::size_t> block_range(std::size_t total, std::size_t parts,
                                                          std::size_t part) noexcept {
  const std::size_t base = total / parts;
  const std::size_t extra = total % parts;
  const std::size_t begin = part * base + (part < extra ? part : extra);
  return {begin, begin + base + (part < extra ? 1 : 0)};
}

}  // namespace pnms

#ifndef WEAKGRAD_PARALLEL_HPP
#define WEAKGRAD_PARALLEL_HPP

#include <Eigen/Core>

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace weakgrad {

using Eigen::Index;

/// Worker count used by every parallel kernel. Defaults to 1.
void set_thread_count(int threads);
int thread_count();

/// Calls body(begin, end) on contiguous chunks of [0, n). Chunks are written
/// by disjoint workers, so kernels that only write their own output slots
/// produce results independent of the worker count.
template <typename Body>
void parallel_for(Index n, Body&& body, Index min_chunk = 64) {
  if (n <= 0) return;
  const Index workers =
      std::min<Index>(thread_count(), std::max<Index>(1, n / std::max<Index>(1, min_chunk)));
  if (workers <= 1) {
    body(Index{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  pool.reserve(static_cast<std::size_t>(workers));
  const Index chunk = (n + workers - 1) / workers;
  for (Index w = 0; w < workers; ++w) {
    const Index begin = w * chunk;
    const Index end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end, w] {
      try {
        body(begin, end);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace weakgrad

#endif  // WEAKGRAD_PARALLEL_HPP

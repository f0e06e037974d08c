#ifndef SMOKEKIT_PARALLEL_HPP
#define SMOKEKIT_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace smokekit {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Work items are
/// claimed from a shared counter; fn must not throw (capture errors per item).
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn &&fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> workers;
  workers.reserve(jobs);
  for (unsigned t = 0; t < jobs; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        fn(i);
      }
    });
  }
}

} // namespace smokekit

#endif // SMOKEKIT_PARALLEL_HPP

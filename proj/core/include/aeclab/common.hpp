#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace aeclab {

// Error categories map 1:1 onto CLI exit codes.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

/// Runs fn(i) for i in [0, n). Work is split across `threads` workers;
/// each index is processed exactly once, so any per-index output slots are
/// filled identically regardless of thread count. threads <= 1 runs inline.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Global default worker count: AECLAB_THREADS env var if set, else
/// hardware_concurrency. CLI --threads overrides via set_default_threads.
int default_threads();
void set_default_threads(int threads);

}  // namespace aeclab

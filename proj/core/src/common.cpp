#include "aeclab/common.hpp"

#include <atomic>
#include <cstdlib>
#include <mutex>

namespace aeclab {

namespace {
std::atomic<int> g_default_threads{0};  // 0 = not yet resolved
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < std::min<std::size_t>(workers, n); ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

int default_threads() {
  int v = g_default_threads.load();
  if (v > 0) return v;
  if (const char* env = std::getenv("AECLAB_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) {
      g_default_threads.store(parsed);
      return parsed;
    }
  }
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int resolved = hw > 0 ? hw : 1;
  g_default_threads.store(resolved);
  return resolved;
}

void set_default_threads(int threads) {
  if (threads > 0) g_default_threads.store(threads);
}

}  // namespace aeclab

#include "csqpt/threading.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace csqpt {

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("CSQPT_THREADS")) {
    try {
      int cap = std::stoi(env);
      if (cap >= 1) return std::min(hw, cap);
    } catch (...) {
      // unparsable value: ignore the cap
    }
  }
  return hw;
}

void parallel_for(int n, const std::function<void(int)>& f) {
  if (n <= 0) return;
  const int workers = std::min(worker_count(), n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    const int lo = static_cast<int>(static_cast<long long>(n) * w / workers);
    const int hi = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
    pool.emplace_back([&, lo, hi] {
      try {
        for (int i = lo; i < hi; ++i) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace csqpt

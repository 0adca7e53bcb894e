#include "twinlight/common/parallel.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace twinlight {

int ThreadCount() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  const char* env = std::getenv("THREADS");
  if (env == nullptr || *env == '\0') return hw;
  char* end = nullptr;
  long n = std::strtol(env, &end, 10);
  if (end == env || n < 0) return hw;
  if (n == 0) return hw;
  return static_cast<int>(std::min<long>(n, 256));
}

void ParallelFor(int begin, int end, const std::function<void(int)>& body) {
  if (end <= begin) return;
  const int workers = std::min(ThreadCount(), end - begin);
  if (workers <= 1) {
    for (int i = begin; i < end; ++i) body(i);
    return;
  }
  std::atomic<int> next{begin};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= end) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(end);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace twinlight

#include "parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace advscore::detail {

int thread_cap() {
  static const int cap = [] {
    int hardware = static_cast<int>(std::thread::hardware_concurrency());
    if (hardware <= 0) hardware = 1;
    const char* env = std::getenv("ADVSCORE_THREADS");
    if (env == nullptr) return hardware;
    try {
      const int v = std::stoi(env);
      if (v <= 0) return hardware;
      return v < hardware ? v : hardware;
    } catch (...) {
      return hardware;
    }
  }();
  return cap;
}

void for_each_chunk(std::size_t n, std::size_t chunk_count,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  if (chunk_count == 0) chunk_count = 1;
  if (chunk_count > n) chunk_count = n;
  const std::size_t chunk_size = (n + chunk_count - 1) / chunk_count;
  const std::size_t chunks = (n + chunk_size - 1) / chunk_size;

  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    const std::size_t end = begin + chunk_size < n ? begin + chunk_size : n;
    fn(c, begin, end);
  };

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(thread_cap()), chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      try {
        for (;;) {
          const std::size_t c = next.fetch_add(1);
          if (c >= chunks) return;
          run_chunk(c);
        }
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace advscore::detail

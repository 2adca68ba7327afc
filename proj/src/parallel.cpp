#include "osclab/parallel.hpp"

#include <atomic>

namespace osclab {

namespace {
std::atomic<unsigned> g_threads{1};
}

void set_thread_count(unsigned count) {
  if (count == 0) {
    count = std::thread::hardware_concurrency();
    if (count == 0) count = 1;
  }
  g_threads.store(count);
}

unsigned thread_count() { return g_threads.load(); }

}  // namespace osclab

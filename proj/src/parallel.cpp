#include "loopqed/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace loopqed {

namespace {
int env_threads() {
  const char* v = std::getenv("LOOPQED_THREADS");
  if (!v || !*v) return 0;
  try {
    return std::max(0, std::stoi(v));
  } catch (...) {
    return 0;
  }
}
}  // namespace

int worker_count() {
  const int n = env_threads();
  return n > 0 ? n : omp_get_max_threads();
}

void apply_thread_override() {
  if (const int n = env_threads(); n > 0) omp_set_num_threads(n);
}

}  // namespace loopqed

#include "holdercover/exec.hpp"

#include <omp.h>

namespace holdercover {

void set_worker_count(int jobs) {
  if (jobs > 0) omp_set_num_threads(jobs);
}

int worker_count() { return omp_get_max_threads(); }

}  // namespace holdercover

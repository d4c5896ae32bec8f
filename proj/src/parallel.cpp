#include "intdim/parallel.hpp"

#include <omp.h>

namespace intdim {
namespace {
int default_threads = omp_get_max_threads();
}

void set_max_threads(int threads) {
    omp_set_num_threads(threads > 0 ? threads : default_threads);
}

int max_threads() {
    return omp_get_max_threads();
}

} // namespace intdim

#include "apm/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace apm {

int thread_count() {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("APM_THREADS")) {
        try {
            int cap = std::stoi(env);
            if (cap > 0 && cap < n) n = cap;
        } catch (const std::exception&) {
        }
    }
    return n < 1 ? 1 : n;
}

}  // namespace apm

#pragma once

#include <cstddef>

namespace apm {

enum class Exec { Serial, Parallel };

// Worker count for sweeps; APM_THREADS caps it when set.
int thread_count();

}  // namespace apm

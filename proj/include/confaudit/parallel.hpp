#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace confaudit {

// 0 means "all cores". Every parallel kernel writes into preassigned slots
// and draws from per-slot derived seeds, so results are identical for any
// worker count; this only controls how many threads OpenMP may use.
inline int resolve_jobs(int jobs) {
#ifdef _OPENMP
    // omp_get_max_threads() reflects a previous omp_set_num_threads call,
    // so "all cores" must come from the processor count instead.
    return jobs <= 0 ? omp_get_num_procs() : jobs;
#else
    (void)jobs;
    return 1;
#endif
}

inline void set_global_jobs(int jobs) {
#ifdef _OPENMP
    omp_set_num_threads(resolve_jobs(jobs));
#else
    (void)jobs;
#endif
}

}  // namespace confaudit

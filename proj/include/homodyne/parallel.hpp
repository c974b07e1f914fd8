#pragma once

#include <omp.h>

namespace homodyne {

/// Worker count for a parallel region: `requested` when positive, else the OpenMP default.
inline int resolve_threads(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

}  // namespace homodyne

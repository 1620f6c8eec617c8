// SPDX-License-Identifier: Apache-2.0
#include "shearlab/exec.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace shear {

int max_threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n)
{
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

bool in_parallel_region()
{
#ifdef _OPENMP
    return omp_in_parallel() != 0;
#else
    return false;
#endif
}

} // namespace shear

// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace shear {

/// Execution policy for the data-parallel kernels. Serial runs the plain
/// loop and is kept as the reference the OpenMP path is tested against;
/// both produce bitwise identical results.
enum class Exec { Serial, Parallel };

/// Number of OpenMP threads (1 when built without OpenMP).
int max_threads();
void set_threads(int n);
bool in_parallel_region();

} // namespace shear

#pragma once

namespace fracvar {

// Caps the number of threads the OpenMP kernels may use.
// 0 restores the automatic default. Initialised from the
// FRACVAR_THREADS environment variable on first use.
void set_max_threads(int n);

// Resolved thread count for parallel regions, always >= 1.
int max_threads();

}  // namespace fracvar

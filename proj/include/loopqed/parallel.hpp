#pragma once

namespace loopqed {

/// Worker count for sample loops: LOOPQED_THREADS if set, else the OpenMP default.
int worker_count();

/// Applies LOOPQED_THREADS (if set) to the OpenMP runtime. Called by the harness.
void apply_thread_override();

}  // namespace loopqed

#pragma once

namespace ctrec {

// Worker count for OpenMP-parallel loops. 0 means "library default"
// (all hardware threads). Results never depend on this value: every
// parallel loop writes to per-index slots or reduces in fixed order.
void set_jobs(int jobs);
int jobs();

// Effective thread count for a loop over n items.
int threads_for(int n);

}  // namespace ctrec

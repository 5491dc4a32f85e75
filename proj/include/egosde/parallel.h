/* Copyright 2026 The EgoSDE Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef EGOSDE_PARALLEL_H_
#define EGOSDE_PARALLEL_H_

#include <functional>

namespace egosde {

// Worker count from EGOSDE_JOBS when set to a positive integer, otherwise the
// number of hardware threads (at least 1).
int DefaultJobs();

// Runs fn(0) .. fn(n - 1) on up to `jobs` threads (jobs <= 0 means
// DefaultJobs()). Callers write results into per-index slots, so output does
// not depend on scheduling. The exception of the lowest failing index is
// rethrown after all workers finish.
void ParallelFor(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace egosde

#endif  // EGOSDE_PARALLEL_H_

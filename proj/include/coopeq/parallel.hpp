#pragma once

#include <functional>

namespace coopeq {

// Worker cap from COOP_EQ_THREADS; defaults to 1 (purely sequential). Values
// below 1 or unparsable values fall back to the default.
int thread_cap();

// Runs fn(0..count-1) across at most thread_cap() workers with static
// chunking. Callers rely on disjoint writes per index, so results are
// identical for every cap.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace coopeq

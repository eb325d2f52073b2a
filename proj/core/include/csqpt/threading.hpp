#pragma once

#include <functional>

namespace csqpt {

// Worker count: min(hardware_concurrency, CSQPT_THREADS) when the env var is
// set, else hardware_concurrency. Always ≥ 1.
int worker_count();

// Splits [0, n) into contiguous blocks, one worker thread per block.
// f must be safe to call concurrently for distinct indices.
void parallel_for(int n, const std::function<void(int)>& f);

}  // namespace csqpt

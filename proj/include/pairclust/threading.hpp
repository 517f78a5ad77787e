#pragma once

#include <cstdint>
#include <functional>

namespace pairclust {

/// Resolves a worker-count request: a positive value is taken as-is, 0 means
/// "auto" (PAIRCLUST_THREADS env var if set, else hardware concurrency).
int resolve_threads(int requested);

/// Splits [begin, end) into at most `threads` contiguous chunks and runs
/// `fn(chunkBegin, chunkEnd)` on each, in parallel when threads > 1.
/// Chunk boundaries depend only on the range and thread count, so workers
/// writing disjoint output slices produce identical results at any thread
/// count.
void parallel_chunks(std::int64_t begin, std::int64_t end, int threads,
                     const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace pairclust

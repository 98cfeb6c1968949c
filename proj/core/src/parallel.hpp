#pragma once

#include <cstddef>
#include <functional>

namespace advscore::detail {

// Thread budget from ADVSCORE_THREADS (0 or unset = hardware concurrency).
int thread_cap();

// Runs fn(chunk_index, begin, end) over [0, n) split into at most
// `chunk_count` chunks. Chunk boundaries depend only on n and chunk_count,
// never on the thread budget, so reductions that combine per-chunk results
// in index order are bit-reproducible regardless of how many threads ran.
void for_each_chunk(std::size_t n, std::size_t chunk_count,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace advscore::detail

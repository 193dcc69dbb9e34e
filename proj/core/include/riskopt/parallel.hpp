#pragma once

#include <cstddef>
#include <functional>

namespace riskopt {

/// Number of workers used when a caller passes 0.
unsigned default_thread_count();

/// Runs body(begin, end) over contiguous blocks of [0, n). Blocks are fixed by
/// `block` alone, so any per-block output is independent of the worker count.
void parallel_for_blocks(std::size_t n, std::size_t block, unsigned threads,
                         const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace riskopt

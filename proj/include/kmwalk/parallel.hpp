#pragma once

#include <cstddef>
#include <functional>

namespace kmwalk {

// Worker count: KMWALK_THREADS environment override, else hardware threads.
unsigned thread_count();

// Runs fn(block) for block = 0..n_blocks-1, possibly concurrently. Blocks may
// land on any thread, so fn must only touch block-local state; callers combine
// per-block results in block order. That fixed combination order is what makes
// parallel and serial runs agree bitwise.
void run_blocks(std::size_t n_blocks, const std::function<void(std::size_t)>& fn);

}  // namespace kmwalk

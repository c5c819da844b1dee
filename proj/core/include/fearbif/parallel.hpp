#pragma once

#include <cstddef>
#include <functional>

namespace fearbif {

/// Worker count: FEARBIF_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
[[nodiscard]] std::size_t thread_budget();

/// Calls body(i) for i in [0, n). Each index is handled exactly once, so
/// results written to slot i are independent of scheduling. The first
/// exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fearbif

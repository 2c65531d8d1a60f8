#pragma once

#include <cstddef>
#include <functional>

namespace locest {

/// Number of worker threads used when a caller passes 0.
unsigned default_workers();

/// Runs fn(i) for i in [0, count). Work items must write only to their own
/// output slots; the final result must not depend on the worker count.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

}  // namespace locest

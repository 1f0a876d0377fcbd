#pragma once

#include <cstddef>
#include <functional>

namespace modacv {

/// Runs fn(i) for i in [0, count) on up to n_threads workers (n_threads <= 0
/// selects the hardware count).  Callers write results into per-index slots
/// and reduce serially afterwards, so reported numbers never depend on the
/// thread count.  The first exception thrown by any fn is rethrown.
void parallel_for(std::size_t count, int n_threads, const std::function<void(std::size_t)>& fn);

/// Hardware concurrency with a floor of 1.
[[nodiscard]] int default_threads() noexcept;

}  // namespace modacv

#ifndef RNPM_PARALLEL_H
#define RNPM_PARALLEL_H

#include <cstddef>
#include <cstdint>
#include <functional>

namespace rnpm {

/// Worker count: RNPM_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int worker_count();

/// Calls body(i) for i in [0, count) on up to `threads` workers (0 means
/// worker_count()). Indices are split into contiguous chunks; results must be
/// written per index so that the outcome does not depend on the split. The
/// first exception thrown by any worker is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)> &body);

/// splitmix64 finalizer, used to derive independent per-trial seeds.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace rnpm

#endif

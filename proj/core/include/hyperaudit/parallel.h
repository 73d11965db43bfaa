#ifndef HYPERAUDIT_PARALLEL_H_
#define HYPERAUDIT_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace hyperaudit {

// Caps the number of worker threads used by ParallelFor. Values <= 0 mean
// "use hardware concurrency". Results never depend on this setting.
void SetMaxThreads(int threads);
int MaxThreads();

// Calls fn(i) for every i in [0, n). Each index is visited exactly once; the
// caller must write results into index-addressed slots so output order is
// independent of scheduling. The first exception thrown by fn is rethrown.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace hyperaudit

#endif  // HYPERAUDIT_PARALLEL_H_

#ifndef TWINLIGHT_COMMON_PARALLEL_H_
#define TWINLIGHT_COMMON_PARALLEL_H_

#include <functional>

namespace twinlight {

// Worker count from the THREADS environment variable. Unset or 0 means all
// hardware threads.
int ThreadCount();

// Runs body(i) for i in [begin, end) on ThreadCount() workers. Callers must
// write only to slots owned by i so results do not depend on scheduling.
// The first exception thrown by any body is rethrown on the calling thread.
void ParallelFor(int begin, int end, const std::function<void(int)>& body);

}  // namespace twinlight

#endif  // TWINLIGHT_COMMON_PARALLEL_H_

#ifndef COGSPEECH_COMMON_PARALLEL_H_
#define COGSPEECH_COMMON_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace cogspeech {

// Runs fn(0..count-1) on up to `jobs` worker threads. Work items are claimed
// dynamically; callers write results into slots indexed by the item so the
// merged output does not depend on the schedule. The first exception thrown
// by any item is rethrown after all workers finish.
void ParallelFor(std::size_t count, int jobs,
                 const std::function<void(std::size_t)>& fn);

}  // namespace cogspeech

#endif  // COGSPEECH_COMMON_PARALLEL_H_

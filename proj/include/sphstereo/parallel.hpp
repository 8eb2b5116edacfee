#pragma once

#include <cstddef>
#include <functional>

namespace sphstereo {

// Worker cap for all internal parallel loops. 0 restores the default
// (SPHERE_STEREO_THREADS if set, else hardware concurrency).
void set_num_threads(int n);
int num_threads();

// Runs body(i) for i in [begin, end), split into contiguous chunks across
// workers. Bodies must write disjoint outputs; results never depend on the
// worker count.
void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end,
                  const std::function<void(std::ptrdiff_t)>& body);

}  // namespace sphstereo

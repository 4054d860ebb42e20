#ifndef WAVEPACK_PARALLEL_HPP
#define WAVEPACK_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace wp {

// Worker count used by parallel_for. 0 or negative means hardware concurrency.
void set_threads(int n);
int threads();

// Runs fn(i) for i in [0, count). Each index must write only its own output,
// so results never depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

// Sum and max with a fixed blocking that does not depend on the thread count,
// so reductions are bit-reproducible.
double ordered_sum(std::size_t count, const std::function<double(std::size_t)>& term);
double ordered_max(std::size_t count, const std::function<double(std::size_t)>& term);

// Pairwise summation of a contiguous array.
double pairwise_sum(const double* v, std::size_t n);

}  // namespace wp

#endif

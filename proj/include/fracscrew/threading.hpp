#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fracscrew::threading {

// Worker cap: min(hardware, FRACSCREW_THREADS if set). At least 1.
int max_threads();

// Evaluates work(i) for i in [0, n) on up to max_threads() workers and returns
// the results indexed by i. Reductions over the result vector happen in index
// order on the caller's side, so sums are independent of the thread count.
std::vector<double> parallel_map(std::size_t n, const std::function<double(std::size_t)>& work);

} // namespace fracscrew::threading

#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace hyperdyn {

// Worker count used by data-parallel operations. Defaults to the
// HYPERDYN_THREADS environment variable, else 1.
std::size_t thread_count();
void set_thread_count(std::size_t n);

// Runs fn(i) for every i in [0, n_tasks). Tasks are handed out
// dynamically; callers must write results into per-task slots so the
// outcome does not depend on scheduling.
void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& fn);

// Pairwise (fixed binary tree) summation. The tree shape depends only on
// the input length, so results are bitwise reproducible.
double pairwise_sum(std::span<const double> xs);

// log(sum exp(xs)) with max-shift and pairwise summation.
double log_sum_exp(std::span<const double> xs);

}  // namespace hyperdyn

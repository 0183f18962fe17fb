#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace greedy {

/// Runs f(0), ..., f(n - 1) and returns the results in index order. Results never depend on
/// the thread count because each replica writes only its own slot.
template <class T, class F>
std::vector<T> parallel_replicas(std::size_t n, int jobs, const F& f) {
  std::vector<T> out(n);
  std::exception_ptr error;
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs > 0 ? jobs : 1)
  for (long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(greedy_replica_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

/// Reference loop for parallel_replicas.
template <class T, class F>
std::vector<T> serial_replicas(std::size_t n, const F& f) {
  std::vector<T> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(f(i));
  return out;
}

}  // namespace greedy

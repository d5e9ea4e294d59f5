#pragma once

// Per-point evaluation over a grid, serial or OpenMP-parallel. Each point is
// an independent pure computation; results land at their grid index, so both
// paths produce identical vectors.

#include <cstddef>
#include <exception>
#include <span>
#include <vector>

namespace vrabi {

enum class Execution { Serial, Parallel };

template <class T, class F>
auto tabulate(std::span<const T> xs, F&& f, Execution exec = Execution::Parallel) {
  using R = decltype(f(xs[0]));
  std::vector<R> out(xs.size());
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
  if (exec == Execution::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = f(xs[i]);
    return out;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = f(xs[i]);
    } catch (...) {
#pragma omp critical(vrabi_tabulate_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

template <class T, class F>
auto tabulate(const std::vector<T>& xs, F&& f, Execution exec = Execution::Parallel) {
  return tabulate(std::span<const T>(xs), std::forward<F>(f), exec);
}

}  // namespace vrabi

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "oldn/tensor/tape.hpp"

namespace oldn {

// Builds a scalar-valued graph from the leaf it is handed.
using ScalarGraph = std::function<Var<double>(const Var<double>& x)>;

struct GradCheckOptions {
  double eps = 1e-4;
  // Probe at most this many distinct coordinates, drawn from sample_seed;
  // 0 probes all.
  std::size_t max_coords = 0;
  // A probe whose ReLU sign pattern differs from the base point is retried
  // with eps shrunk by 10, at most this many times.
  int kink_retries = 3;
  std::uint64_t sample_seed = 0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t coords_checked = 0;
  std::size_t kink_retries = 0;
};

// Central differences (f(x+εe)−f(x−εe))/(2ε) against the tape gradient; the
// error per coordinate is |a−b|/max(|a|,|b|,1e-12).
GradCheckReport finite_diff_check(const ScalarGraph& f, const Tensor<double>& x, const GradCheckOptions& options = {});

inline double finite_diff_check(const ScalarGraph& f, const Tensor<double>& x, double eps) {
  return finite_diff_check(f, x, GradCheckOptions{eps, 0, 3, 0}).max_rel_error;
}

}  // namespace oldn

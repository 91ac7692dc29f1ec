#include "oldn/tensor/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace oldn {
namespace {

struct Probe {
  double value;
  std::uint64_t signature;
};

Probe evaluate(const ScalarGraph& f, const Tensor<double>& x) {
  Tape<double> tape;
  tape.set_track_kinks(true);
  Var<double> out = f(tape.leaf(x, false));
  if (!out.shape().is_scalar()) throw Error(ErrorCode::kNonScalarLoss, "graph output " + out.shape().str());
  return {out.value()[0], tape.kink_signature()};
}

}  // namespace

GradCheckReport finite_diff_check(const ScalarGraph& f, const Tensor<double>& x, const GradCheckOptions& options) {
  Tape<double> tape;
  tape.set_track_kinks(true);
  Var<double> leaf = tape.leaf(x, true);
  Var<double> out = f(leaf);
  tape.backward(out);
  const Tensor<double> analytic = leaf.grad();
  const std::uint64_t base_signature = tape.kink_signature();

  const std::size_t n = x.size();
  std::vector<std::size_t> coords(n);
  std::iota(coords.begin(), coords.end(), std::size_t{0});
  if (options.max_coords != 0 && options.max_coords < n) {
    // partial Fisher-Yates, then back to ascending order
    std::mt19937_64 rng(options.sample_seed);
    for (std::size_t k = 0; k < options.max_coords; ++k) std::swap(coords[k], coords[k + rng() % (n - k)]);
    coords.resize(options.max_coords);
    std::sort(coords.begin(), coords.end());
  }

  GradCheckReport report;
  Tensor<double> probe = x;
  for (const std::size_t i : coords) {
    double eps = options.eps;
    double numeric = 0.0;
    for (int attempt = 0;; ++attempt) {
      probe[i] = x[i] + eps;
      const Probe plus = evaluate(f, probe);
      probe[i] = x[i] - eps;
      const Probe minus = evaluate(f, probe);
      probe[i] = x[i];
      numeric = (plus.value - minus.value) / (2.0 * eps);
      const bool crossed = plus.signature != base_signature || minus.signature != base_signature;
      if (!crossed || attempt >= options.kink_retries) break;
      eps *= 0.1;
      ++report.kink_retries;
    }
    const double a = analytic[i];
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-12});
    report.max_rel_error = std::max(report.max_rel_error, std::abs(a - numeric) / denom);
    ++report.coords_checked;
  }
  return report;
}

}  // namespace oldn

#include "oldn/harness/rate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace oldn {

double rate_proxy_bits(std::span<const std::int32_t> levels) {
  std::map<std::int32_t, std::uint64_t> hist;
  std::uint64_t nnz = 0;
  for (std::int32_t l : levels) {
    if (l == 0) continue;
    ++hist[l];
    ++nnz;
  }
  if (nnz == 0) return 0.0;
  double h = 0.0;
  for (const auto& [level, count] : hist) {
    const double p = static_cast<double>(count) / static_cast<double>(nnz);
    h -= p * std::log2(p);
  }
  return static_cast<double>(nnz) * std::max(1.0, h);
}

}  // namespace oldn

#include "oldn/harness/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace oldn {

double psnr_from_mse(double mse) {
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double psnr(const Plane& a, const Plane& b) {
  if (a.width != b.width || a.height != b.height) {
    throw Error(ErrorCode::kShapeMismatch, "psnr of " + std::to_string(a.width) + "x" + std::to_string(a.height) +
                                               " and " + std::to_string(b.width) + "x" + std::to_string(b.height));
  }
  if (a.samples.empty()) throw Error(ErrorCode::kEmptyInput, "psnr of empty planes");
  std::uint64_t sse = 0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const int d = static_cast<int>(a.samples[i]) - static_cast<int>(b.samples[i]);
    sse += static_cast<std::uint64_t>(d * d);
  }
  return psnr_from_mse(static_cast<double>(sse) / static_cast<double>(a.samples.size()));
}

}  // namespace oldn

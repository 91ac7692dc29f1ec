#pragma once

#include <array>
#include <vector>

namespace oldn {

struct RdPoint {
  double rate = 0.0;  // bits
  double psnr = 0.0;  // dB
};

using RdCurve = std::vector<RdPoint>;

enum class BdIntegration {
  kAnalytic,  // exact integral of the fitted cubic
  kSimpson,   // 1000-interval composite Simpson
};

// Least-squares cubic log10(rate) = p(psnr). Coefficients are for the
// centred variable t = (psnr - centre) / scale, lowest order first.
struct LogRateFit {
  std::array<double, 4> coef{};
  double centre = 0.0;
  double scale = 1.0;

  double operator()(double psnr) const;
  // Exact integral over [lo, hi].
  double integral(double lo, double hi) const;
};

// Throws kTooFewPoints below 4 points and kInvalidArgument for a
// non-positive or non-finite rate.
LogRateFit fit_log_rate(const RdCurve& curve);

// Bjøntegaard rate delta in percent; negative means `test` needs less rate.
// Throws kNoOverlap when the PSNR ranges do not intersect.
double bd_rate(const RdCurve& anchor, const RdCurve& test, BdIntegration method = BdIntegration::kAnalytic);

}  // namespace oldn

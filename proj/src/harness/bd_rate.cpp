#include "oldn/harness/bd_rate.hpp"

#include <algorithm>
#include <cmath>

#include "oldn/error.hpp"

namespace oldn {
namespace {

constexpr int kSimpsonIntervals = 1000;

// 4×4 solve with partial pivoting.
std::array<double, 4> solve4(std::array<std::array<double, 5>, 4> a) {
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (a[piv][col] == 0.0) throw Error(ErrorCode::kInvalidArgument, "degenerate RD curve (repeated PSNR values)");
    std::swap(a[col], a[piv]);
    for (int r = col + 1; r < 4; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int k = col; k < 5; ++k) a[r][k] -= f * a[col][k];
    }
  }
  std::array<double, 4> x{};
  for (int r = 3; r >= 0; --r) {
    double s = a[r][4];
    for (int k = r + 1; k < 4; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

std::pair<double, double> psnr_range(const RdCurve& c) {
  auto [lo, hi] = std::minmax_element(c.begin(), c.end(), [](const RdPoint& a, const RdPoint& b) { return a.psnr < b.psnr; });
  return {lo->psnr, hi->psnr};
}

double simpson(const LogRateFit& f, double lo, double hi) {
  const double h = (hi - lo) / kSimpsonIntervals;
  double s = f(lo) + f(hi);
  for (int i = 1; i < kSimpsonIntervals; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

}  // namespace

double LogRateFit::operator()(double psnr) const {
  const double t = (psnr - centre) / scale;
  return coef[0] + t * (coef[1] + t * (coef[2] + t * coef[3]));
}

double LogRateFit::integral(double lo, double hi) const {
  auto antideriv = [&](double p) {
    const double t = (p - centre) / scale;
    return scale * t * (coef[0] + t * (coef[1] / 2 + t * (coef[2] / 3 + t * coef[3] / 4)));
  };
  return antideriv(hi) - antideriv(lo);
}

LogRateFit fit_log_rate(const RdCurve& curve) {
  if (curve.size() < 4) {
    throw Error(ErrorCode::kTooFewPoints, "BD-rate needs at least 4 RD points, got " + std::to_string(curve.size()));
  }
  LogRateFit fit;
  auto [lo, hi] = psnr_range(curve);
  fit.centre = 0.5 * (lo + hi);
  fit.scale = hi > lo ? 0.5 * (hi - lo) : 1.0;

  std::array<std::array<double, 5>, 4> normal{};
  for (const RdPoint& p : curve) {
    if (!(p.rate > 0.0) || !std::isfinite(p.rate) || !std::isfinite(p.psnr)) {
      throw Error(ErrorCode::kInvalidArgument, "RD point needs a positive rate and finite PSNR");
    }
    const double t = (p.psnr - fit.centre) / fit.scale;
    const double y = std::log10(p.rate);
    const double pw[4] = {1.0, t, t * t, t * t * t};
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) normal[r][c] += pw[r] * pw[c];
      normal[r][4] += pw[r] * y;
    }
  }
  fit.coef = solve4(normal);
  return fit;
}

double bd_rate(const RdCurve& anchor, const RdCurve& test, BdIntegration method) {
  const LogRateFit fa = fit_log_rate(anchor);
  const LogRateFit ft = fit_log_rate(test);
  const auto [alo, ahi] = psnr_range(anchor);
  const auto [tlo, thi] = psnr_range(test);
  const double lo = std::max(alo, tlo);
  const double hi = std::min(ahi, thi);
  if (!(hi > lo)) throw Error(ErrorCode::kNoOverlap, "RD curves share no PSNR interval");

  double ia, it;
  if (method == BdIntegration::kAnalytic) {
    ia = fa.integral(lo, hi);
    it = ft.integral(lo, hi);
  } else {
    ia = simpson(fa, lo, hi);
    it = simpson(ft, lo, hi);
  }
  const double avg_diff = (it - ia) / (hi - lo);
  return (std::pow(10.0, avg_diff) - 1.0) * 100.0;
}

}  // namespace oldn

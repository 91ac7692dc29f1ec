#include "oldn/param_codec/residual.hpp"

#include <algorithm>
#include <cmath>

namespace oldn {
namespace {

void check_prec(int prec) {
  if (prec < 0 || prec > kMaxPrec) {
    throw Error(ErrorCode::kInvalidArgument, "residual precision " + std::to_string(prec) + " outside [0, 30]");
  }
}

}  // namespace

bool ResidualSymbols::all_zero() const noexcept {
  return std::all_of(symbols.begin(), symbols.end(), [](std::int16_t s) { return s == 0; });
}

ResidualSymbols quantize_residual(const AlSnapshot& online, const AlSnapshot& baseline, int prec) {
  check_prec(prec);
  if (online.size() != baseline.size()) {
    throw Error(ErrorCode::kSizeMismatch, "snapshots of length " + std::to_string(online.size()) + " and " +
                                              std::to_string(baseline.size()));
  }
  const double scale = std::ldexp(1.0, prec);
  ResidualSymbols out;
  out.prec = prec;
  out.symbols.reserve(online.size());
  for (std::size_t i = 0; i < online.size(); ++i) {
    const double d = (static_cast<double>(online.weights[i]) - static_cast<double>(baseline.weights[i])) * scale;
    // std::round rounds halves away from zero
    const double r = std::clamp(std::round(d), -static_cast<double>(kMaxSymbol), static_cast<double>(kMaxSymbol));
    out.symbols.push_back(static_cast<std::int16_t>(r));
  }
  return out;
}

AlSnapshot dequantize_residual(const AlSnapshot& baseline, const ResidualSymbols& residual) {
  check_prec(residual.prec);
  if (residual.size() != baseline.size()) {
    throw Error(ErrorCode::kSizeMismatch, std::to_string(residual.size()) + " symbols for " +
                                              std::to_string(baseline.size()) + " adaptive weights");
  }
  AlSnapshot out = baseline;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.weights[i] = static_cast<float>(static_cast<double>(baseline.weights[i]) +
                                        std::ldexp(static_cast<double>(residual.symbols[i]), -residual.prec));
  }
  return out;
}

ModelParams apply_residual(const ModelParams& baseline, const ResidualSymbols& residual) {
  ModelParams out = baseline;
  out.set_al_snapshot(dequantize_residual(baseline.al_snapshot(), residual));
  return out;
}

}  // namespace oldn

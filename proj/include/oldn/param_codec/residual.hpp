#pragma once

#include <cstdint>
#include <vector>

#include "oldn/network/params.hpp"

namespace oldn {

inline constexpr int kDefaultPrec = 8;
inline constexpr int kMaxPrec = 30;
inline constexpr std::int32_t kMaxSymbol = 32767;

// s_i = round((online_i - baseline_i) · 2^prec), half away from zero.
struct ResidualSymbols {
  std::vector<std::int16_t> symbols;
  int prec = kDefaultPrec;

  std::size_t size() const noexcept { return symbols.size(); }
  bool all_zero() const noexcept;
  friend bool operator==(const ResidualSymbols&, const ResidualSymbols&) = default;
};

// Throws kSizeMismatch on unequal lengths, kInvalidArgument for prec outside
// [0, kMaxPrec]. Symbols saturate at ±kMaxSymbol.
ResidualSymbols quantize_residual(const AlSnapshot& online, const AlSnapshot& baseline, int prec = kDefaultPrec);

// baseline_i + s_i · 2^-prec, evaluated in double and rounded once to float.
AlSnapshot dequantize_residual(const AlSnapshot& baseline, const ResidualSymbols& residual);

// Decoder update: adaptive layers of a copy of `baseline` replaced by the
// dequantized weights. Throws kSizeMismatch when the symbol count differs
// from the model's online parameter count.
ModelParams apply_residual(const ModelParams& baseline, const ResidualSymbols& residual);

}  // namespace oldn

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oldn/param_codec/residual.hpp"

namespace oldn {

// Serialized residual:
//   "ALRS" | u8 version=1 | u8 prec | u16 count | u16 alphabet size A |
//   A × (i16 symbol, u8 code length) | payload, MSB first, zero padded.
// Integers are little-endian. Records are in canonical order (length, then
// symbol value), which fully determines the codewords.
struct AlResidualStream {
  std::vector<std::uint8_t> bytes;

  friend bool operator==(const AlResidualStream&, const AlResidualStream&) = default;
};

inline constexpr std::uint8_t kStreamVersion = 1;
inline constexpr std::size_t kStreamFixedHeaderBytes = 10;
inline constexpr int kMaxCodeLength = 32;

struct CodeEntry {
  std::int16_t symbol = 0;
  int length = 0;
  std::uint32_t code = 0;
};

// Canonical code for the given symbol histogram. A lone symbol gets a 1-bit
// code. Entries are returned in canonical order.
std::vector<CodeEntry> build_canonical_code(std::span<const std::int16_t> symbols);

// Throws kEmptyInput on an empty sequence and kInvalidArgument when the
// count or alphabet does not fit 16 bits.
AlResidualStream huffman_encode(const ResidualSymbols& residual);

// Distinct errors: kBadMagic, kBadVersion, kTruncated (header, table or
// payload cut short), kInvalidCodeTable, kCorruptPayload (bits that match no
// codeword), kTrailingData (whole bytes after the padded payload).
ResidualSymbols huffman_decode(std::span<const std::uint8_t> bytes);
inline ResidualSymbols huffman_decode(const AlResidualStream& s) { return huffman_decode(std::span(s.bytes)); }

// Header and padded payload, in bits.
std::size_t stream_size_bits(const AlResidualStream& s);

// Ideal code length lower bound: count · H(symbol histogram), in bits.
double entropy_bits(std::span<const std::int16_t> symbols);

}  // namespace oldn

#pragma once

#include <cstdint>
#include <span>

namespace oldn {

// Image rate stand-in: nonzero coefficient count × max(1, entropy in bits of
// the nonzero level histogram). Falls as quantization coarsens.
double rate_proxy_bits(std::span<const std::int32_t> levels);

}  // namespace oldn

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace oldn {

struct CheckResult {
  std::string name;
  double value = 0.0;      // measured error
  double tolerance = 0.0;  // pass when value <= tolerance
  bool passed = false;
};

// Central finite differences, in double precision, for every differentiable
// op, the network blocks and a toy network (n=8, 8×8 chroma, 16×16 luma)
// with respect to both inputs and every parameter tensor.
std::vector<CheckResult> run_gradient_suite(std::uint64_t seed, double tolerance = 1e-4);

// Block-DCT properties on `planes` random 64×64 planes in single precision:
// round trip, agreement with a direct per-block evaluation, Parseval,
// linearity, and orthonormality of the kernel bank.
std::vector<CheckResult> run_transform_suite(std::uint64_t seed, int planes = 100);

}  // namespace oldn

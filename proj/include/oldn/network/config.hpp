#pragma once

#include <string>
#include <vector>

namespace oldn {

enum class BlockKind {
  kWide,        // WB: CAB-gated wide-activation residual block
  kOnlineWide,  // OL-WB: adaptive-layer-gated, online trainable
};

struct ModelConfig {
  int n = 64;              // trunk width
  int expand = 4;          // wide-activation factor (inner width n·expand)
  int cab_reduction = 4;   // CAB hidden width n / cab_reduction
  int n_wb_branch = 2;     // WBs per input branch
  std::vector<BlockKind> recon_blocks{BlockKind::kOnlineWide, BlockKind::kWide, BlockKind::kOnlineWide,
                                      BlockKind::kWide};

  // Throws kInvalidArgument describing the first violated constraint.
  void validate() const;

  int online_block_count() const;
  std::string describe() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

}  // namespace oldn

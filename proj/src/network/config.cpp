#include "oldn/network/config.hpp"

#include <algorithm>

#include "oldn/error.hpp"

namespace oldn {

void ModelConfig::validate() const {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  if (expand < 1) throw Error(ErrorCode::kInvalidArgument, "expand must be >= 1");
  if (cab_reduction < 1 || n % cab_reduction != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "cab_reduction " + std::to_string(cab_reduction) + " must divide n " + std::to_string(n));
  }
  if (n_wb_branch < 0) throw Error(ErrorCode::kInvalidArgument, "n_wb_branch must be >= 0");
  if (online_block_count() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "reconstruction trunk needs at least one OL-WB");
  }
}

int ModelConfig::online_block_count() const {
  return static_cast<int>(std::count(recon_blocks.begin(), recon_blocks.end(), BlockKind::kOnlineWide));
}

std::string ModelConfig::describe() const {
  std::string trunk;
  for (BlockKind k : recon_blocks) {
    if (!trunk.empty()) trunk += ",";
    trunk += k == BlockKind::kOnlineWide ? "OL-WB" : "WB";
  }
  return "n=" + std::to_string(n) + " expand=" + std::to_string(expand) + " cab_reduction=" +
         std::to_string(cab_reduction) + " n_wb_branch=" + std::to_string(n_wb_branch) + " recon=[" + trunk + "]";
}

}  // namespace oldn

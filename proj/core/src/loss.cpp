#include "synvol/loss.hpp"

namespace synvol {

double auto_fg_weight(const MaskVolume& target) {
  const auto fg = static_cast<double>(count_nonzero(target));
  const auto bg = static_cast<double>(target.size()) - fg;
  if (fg == 0.0) return kMaxFgWeight;
  return std::clamp(bg / fg, 1.0, kMaxFgWeight);
}

}  // namespace synvol

#pragma once

// Weighted binary cross entropy and the two-stage training objectives, with
// analytic gradients. Templated on the prediction element type so gradient
// checks can run in double precision.

#include <algorithm>
#include <cmath>
#include <concepts>

#include "synvol/volume.hpp"

namespace synvol {

inline constexpr double kProbClamp = 1e-7;
inline constexpr double kMaxFgWeight = 100.0;

/// clamp(N_bg / N_fg, 1, 100).
double auto_fg_weight(const MaskVolume& target);

template <std::floating_point T>
struct LossSample {
  const Volume<T>& predictions;
  const MaskVolume& targets;
  double fg_weight = 1.0;
};

namespace detail {

template <std::floating_point T>
void check_sample(const LossSample<T>& s) {
  if (s.predictions.dims() != s.targets.dims()) {
    throw Error(ErrorCode::invariant, "prediction dims " + to_string(s.predictions.dims()) +
                                          " differ from target dims " + to_string(s.targets.dims()));
  }
  if (!(s.fg_weight > 0.0)) throw Error(ErrorCode::range, "fg_weight must be positive");
}

}  // namespace detail

/// mean over voxels of -[w*y*log(p) + (1-y)*log(1-p)], p clamped to [1e-7, 1-1e-7].
template <std::floating_point T>
double wbce(const LossSample<T>& s) {
  detail::check_sample(s);
  const auto p = s.predictions.values();
  const auto y = s.targets.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double q = std::clamp(static_cast<double>(p[i]), kProbClamp, 1.0 - kProbClamp);
    sum -= y[i] ? s.fg_weight * std::log(q) : std::log(1.0 - q);
  }
  return sum / static_cast<double>(p.size());
}

/// d wbce / d p per voxel: (-w*y/p + (1-y)/(1-p)) / N inside the clamp
/// interval, 0 where the clamp is active.
template <std::floating_point T>
Volume<double> wbce_grad(const LossSample<T>& s) {
  detail::check_sample(s);
  Volume<double> grad(s.predictions.dims());
  const auto p = s.predictions.values();
  const auto y = s.targets.values();
  const auto n = static_cast<double>(p.size());
  auto g = grad.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double q = static_cast<double>(p[i]);
    if (q < kProbClamp || q > 1.0 - kProbClamp) continue;
    g[i] = (y[i] ? -s.fg_weight / q : 1.0 / (1.0 - q)) / n;
  }
  return grad;
}

template <std::floating_point T>
double stage1_loss(const LossSample<T>& source_pre, const LossSample<T>& source_post) {
  return wbce(source_pre) + wbce(source_post);
}

template <std::floating_point T>
double stage2_loss(const LossSample<T>& source_pre, const LossSample<T>& source_post,
                   const LossSample<T>& target_pre, const LossSample<T>& target_post) {
  return wbce(source_pre) + wbce(source_post) + wbce(target_pre) + wbce(target_post);
}

}  // namespace synvol

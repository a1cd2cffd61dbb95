#include "synvol/tile.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace synvol {

std::vector<std::int64_t> axis_offsets(std::int64_t extent, std::int64_t patch) {
  if (patch <= 0 || patch > extent) {
    throw Error(ErrorCode::plan, "patch extent " + std::to_string(patch) + " does not fit volume extent " +
                                     std::to_string(extent));
  }
  const std::int64_t stride = std::max<std::int64_t>(1, patch / 2);
  std::vector<std::int64_t> offsets;
  for (std::int64_t o = 0; o + patch <= extent; o += stride) offsets.push_back(o);
  if (offsets.back() + patch < extent) offsets.push_back(extent - patch);
  return offsets;
}

PatchPlan plan_patches(Dims volume, Dims patch) {
  require_positive(volume, "volume dims");
  require_positive(patch, "patch dims");
  if (patch.d > volume.d || patch.h > volume.h || patch.w > volume.w) {
    throw Error(ErrorCode::plan, "patch " + to_string(patch) + " larger than volume " + to_string(volume));
  }
  PatchPlan plan{volume, patch,
                 {std::max<std::int64_t>(1, patch.d / 2), std::max<std::int64_t>(1, patch.h / 2),
                  std::max<std::int64_t>(1, patch.w / 2)},
                 {}};
  const auto zs = axis_offsets(volume.d, patch.d);
  const auto ys = axis_offsets(volume.h, patch.h);
  const auto xs = axis_offsets(volume.w, patch.w);
  plan.offsets.reserve(zs.size() * ys.size() * xs.size());
  for (auto z : zs)
    for (auto y : ys)
      for (auto x : xs) plan.offsets.push_back({z, y, x});
  return plan;
}

std::vector<double> bump_profile(std::int64_t n, double floor) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    w[i] = floor + (1.0 - floor) * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * t));
  }
  return w;
}

BumpWeights::BumpWeights(Dims patch, double floor)
    : dims_(patch), profiles_{bump_profile(patch.d, floor), bump_profile(patch.h, floor), bump_profile(patch.w, floor)} {
  require_positive(patch, "patch dims");
}

ProbVolume BumpWeights::to_volume() const {
  ProbVolume v(dims_);
  for (std::int64_t z = 0; z < dims_.d; ++z)
    for (std::int64_t y = 0; y < dims_.h; ++y)
      for (std::int64_t x = 0; x < dims_.w; ++x) v.at({z, y, x}) = static_cast<float>(at({z, y, x}));
  return v;
}

BumpWeights bump_weights(Dims patch) { return BumpWeights(patch); }

Blender::Blender(Dims volume, BumpWeights weights)
    : volume_(volume), weights_(std::move(weights)), value_sum_(volume.voxels(), 0.0), weight_sum_(volume.voxels(), 0.0) {
  require_positive(volume, "volume dims");
}

void Blender::add(Coord offset, const ProbVolume& values) {
  const Dims p = weights_.dims();
  if (values.dims() != p) {
    throw Error(ErrorCode::plan, "patch dims " + to_string(values.dims()) + " differ from weight dims " + to_string(p));
  }
  if (!volume_.contains(offset) || offset.z + p.d > volume_.d || offset.y + p.h > volume_.h ||
      offset.x + p.w > volume_.w) {
    throw Error(ErrorCode::plan, "patch at " + to_string(offset) + " extends outside volume " + to_string(volume_));
  }
  const auto& wz = weights_.profile(0);
  const auto& wy = weights_.profile(1);
  const auto& wx = weights_.profile(2);
  for (std::int64_t z = 0; z < p.d; ++z) {
    for (std::int64_t y = 0; y < p.h; ++y) {
      const double wzy = wz[z] * wy[y];
      const float* src = &values.at({z, y, 0});
      const std::size_t row = volume_.index({offset.z + z, offset.y + y, offset.x});
      for (std::int64_t x = 0; x < p.w; ++x) {
        const double w = wzy * wx[x];
        value_sum_[row + x] += w * src[x];
        weight_sum_[row + x] += w;
      }
    }
  }
}

ProbVolume Blender::finish() const {
  ProbVolume out(volume_);
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    if (weight_sum_[i] <= 0.0) {
      throw Error(ErrorCode::plan, "voxel " + to_string(volume_.coord(i)) + " is not covered by any patch");
    }
    dst[i] = static_cast<float>(std::clamp(value_sum_[i] / weight_sum_[i], 0.0, 1.0));
  }
  return out;
}

ProbVolume blend(std::span<const Patch> patches, Dims volume, const BumpWeights& weights) {
  Blender blender(volume, weights);
  for (const auto& p : patches) blender.add(p.offset, p.values);
  return blender.finish();
}

ProbVolume crop(const ProbVolume& volume, Coord offset, Dims patch) {
  const Dims& v = volume.dims();
  if (!v.contains(offset) || offset.z + patch.d > v.d || offset.y + patch.h > v.h || offset.x + patch.w > v.w) {
    throw Error(ErrorCode::plan, "crop at " + to_string(offset) + " extends outside volume " + to_string(v));
  }
  ProbVolume out(patch);
  for (std::int64_t z = 0; z < patch.d; ++z) {
    for (std::int64_t y = 0; y < patch.h; ++y) {
      const float* src = &volume.at({offset.z + z, offset.y + y, offset.x});
      std::copy(src, src + patch.w, &out.at({z, y, 0}));
    }
  }
  return out;
}

ProbVolume infer_tiled(const PatchPlan& plan, const PatchSource& source) {
  Blender blender(plan.volume, BumpWeights(plan.patch));
  for (const Coord offset : plan.offsets) blender.add(offset, source(offset, plan.patch));
  return blender.finish();
}

}  // namespace synvol

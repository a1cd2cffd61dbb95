#pragma once

// Sliding-window inference over large volumes: patch planning with 50%
// overlap and bump-weighted blending of the per-patch predictions.

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "synvol/volume.hpp"

namespace synvol {

struct PatchPlan {
  Dims volume;
  Dims patch;
  Dims stride;
  /// Patch origins, z-major then y then x, each ascending.
  std::vector<Coord> offsets;
};

/// Per axis: 0, s, 2s, ... with s = max(1, patch/2) while the patch fits,
/// plus a final offset dim-patch when the last patch stops short of the edge.
PatchPlan plan_patches(Dims volume, Dims patch);

/// Per-axis offsets used by plan_patches.
std::vector<std::int64_t> axis_offsets(std::int64_t extent, std::int64_t patch);

inline constexpr double kBumpFloor = 1e-3;

/// Raised-cosine profile with a positive floor:
/// w(i) = eps + (1-eps) * 0.5 * (1 - cos(2*pi*(i+0.5)/n)).
std::vector<double> bump_profile(std::int64_t n, double floor = kBumpFloor);

/// Separable product of per-axis bump profiles.
class BumpWeights {
 public:
  explicit BumpWeights(Dims patch, double floor = kBumpFloor);

  const Dims& dims() const { return dims_; }

  double at(Coord c) const { return profiles_[0][c.z] * profiles_[1][c.y] * profiles_[2][c.x]; }
  const std::vector<double>& profile(int axis) const { return profiles_[axis]; }

  ProbVolume to_volume() const;

 private:
  Dims dims_;
  std::array<std::vector<double>, 3> profiles_;
};

BumpWeights bump_weights(Dims patch);

struct Patch {
  Coord offset;
  ProbVolume values;
};

/// Accumulates weighted patch values and normalizes once at the end. The
/// result does not depend on the order patches are added.
class Blender {
 public:
  Blender(Dims volume, BumpWeights weights);

  void add(Coord offset, const ProbVolume& values);

  /// Throws Error(plan) if some voxel never received a patch.
  ProbVolume finish() const;

 private:
  Dims volume_;
  BumpWeights weights_;
  std::vector<double> value_sum_;
  std::vector<double> weight_sum_;
};

ProbVolume blend(std::span<const Patch> patches, Dims volume, const BumpWeights& weights);

/// Produces the probability patch for a given origin and patch extent.
using PatchSource = std::function<ProbVolume(Coord offset, Dims patch)>;

/// Runs `source` over every patch of `plan` and blends the outputs.
ProbVolume infer_tiled(const PatchPlan& plan, const PatchSource& source);

/// Copies the sub-volume at `offset` with extent `patch`.
ProbVolume crop(const ProbVolume& volume, Coord offset, Dims patch);

}  // namespace synvol

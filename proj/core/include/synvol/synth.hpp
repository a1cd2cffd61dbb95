#pragma once

// Synthetic pre/post scenes and Gaussian probability renders standing in for
// segmentation network outputs.

#include <cstdint>
#include <span>

#include "synvol/annotation.hpp"
#include "synvol/volume.hpp"

namespace synvol {

struct SceneSpec {
  Dims dims{64, 64, 64};
  int n_pairs = 10;
  /// Minimum Chebyshev distance between two points of the same kind.
  std::int64_t min_spacing = 15;
  /// Euclidean distance range between a pre and its post.
  double pair_offset_min = 3.0;
  double pair_offset_max = 6.0;
  /// Minimum distance of every point from the volume border.
  std::int64_t margin = 8;
  std::uint64_t seed = 0;
};

/// Pres get ids 1..n, posts n+1..2n with partner_id = their pre. Every post's
/// nearest pre (ties to lower id) is its own partner. Deterministic per seed;
/// throws Error(placement) when the spec cannot be met within bounded retries.
AnnotationSet make_scene(const SceneSpec& spec);

/// SplitMix64 step; the counter-based generator behind render noise.
std::uint64_t splitmix64(std::uint64_t x);

/// Uniform double in [0,1) from the top 53 bits.
double unit_interval(std::uint64_t bits);

inline constexpr double kRenderTruncation = 4.0;  // in sigmas

/// Sum of peak-1 isotropic Gaussians (cut at 4 sigma) around each center,
/// plus uniform noise in [0, noise_amp] drawn per voxel from (seed, index),
/// clamped to [0,1].
ProbVolume render_probability(std::span<const Coord> centers, Dims dims, double sigma, double noise_amp,
                              std::uint64_t seed);

}  // namespace synvol

#pragma once

// Weak point annotations to cubic ground-truth masks.

#include <span>

#include "synvol/annotation.hpp"
#include "synvol/volume.hpp"

namespace synvol {

/// Cube half-width in voxels; the mask around a point has side 2R+1.
struct RasterConfig {
  int radius = 3;
};

inline constexpr int kDefaultRadius = 3;

/// Voxel is foreground iff it lies within Chebyshev distance `radius` of some
/// center. Cubes are clipped at the borders and merge where they overlap.
MaskVolume rasterize_squares(std::span<const Coord> centers, Dims dims, int radius);
MaskVolume rasterize_squares(const AnnotationSet& points, PointKind kind, Dims dims, int radius);

/// Instance-aware variant: each voxel inside some cube takes the id of the
/// Euclidean-nearest point among the cubes covering it, ties to the lower id.
/// Ids must be nonzero since 0 is background.
LabelVolume rasterize_instances(std::span<const Site> points, Dims dims, int radius);

}  // namespace synvol

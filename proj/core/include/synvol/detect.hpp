#pragma once

// Probability volume -> discrete detections: hard threshold, 3D connected
// component labeling and per-component centroids.

#include <cstdint>
#include <vector>

#include "synvol/annotation.hpp"
#include "synvol/volume.hpp"

namespace synvol {

struct Thresholds {
  double gamma_pre = 0.75;
  double gamma_post = 0.65;

  double for_kind(PointKind k) const { return k == PointKind::pre ? gamma_pre : gamma_post; }
};

/// Throws Error(range) unless gamma lies in the open interval (0,1).
void check_gamma(double gamma);

enum class Connectivity { six = 6, twenty_six = 26 };

Connectivity connectivity_from_int(int n);

struct Detection {
  std::uint32_t component_id = 0;
  Coord centroid;
  std::uint64_t voxel_count = 0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct DetectParams {
  double gamma = 0.75;
  Connectivity connectivity = Connectivity::twenty_six;
  std::uint64_t min_size = 1;
};

/// out(v) = 1 iff prob(v) >= gamma.
MaskVolume threshold(const ProbVolume& prob, double gamma);

struct Components {
  LabelVolume labels;
  std::uint32_t count = 0;
};

/// Two-pass union-find labeling. Ids 1..count are assigned in ascending order
/// of each component's smallest linear voxel index.
Components label_components(const MaskVolume& mask, Connectivity connectivity = Connectivity::twenty_six);

/// Per component with at least `min_size` voxels: the per-axis mean voxel
/// coordinate rounded half-up. Sorted by component id.
std::vector<Detection> centroids(const LabelVolume& labels, std::uint64_t min_size = 1);

std::vector<Detection> detect(const ProbVolume& prob, const DetectParams& params);

/// Same as detect() but starting from an already binary mask.
std::vector<Detection> detect_mask(const MaskVolume& mask, Connectivity connectivity, std::uint64_t min_size);

/// Detections as point annotations of one kind, id = component id.
AnnotationSet to_annotations(const std::vector<Detection>& detections, PointKind kind, Dims dims);

}  // namespace synvol

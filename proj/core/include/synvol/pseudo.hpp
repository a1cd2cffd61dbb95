#pragma once

// Target-domain pseudo labels: threshold the source model's probabilities,
// take component centers, and regenerate cubic masks around them.

#include <utility>

#include "synvol/annotation.hpp"
#include "synvol/detect.hpp"
#include "synvol/raster.hpp"
#include "synvol/volume.hpp"

namespace synvol {

struct PseudoParams {
  Thresholds thresholds;
  int radius = kDefaultRadius;
  Connectivity connectivity = Connectivity::twenty_six;
  std::uint64_t min_size = 1;
};

struct PseudoLabels {
  MaskVolume mask_pre;
  MaskVolume mask_post;
  AnnotationSet points_pre;
  AnnotationSet points_post;
};

/// points = detect(prob, gamma) per class, masks = rasterize_squares(points, R).
/// Point ids are sequential from 1 within each class.
PseudoLabels generate_pseudo_labels(const ProbVolume& prob_pre, const ProbVolume& prob_post, const PseudoParams& params);

/// Baseline: the thresholded probabilities themselves, without regeneration.
std::pair<MaskVolume, MaskVolume> pseudo_from_segmentation(const ProbVolume& prob_pre, const ProbVolume& prob_post,
                                                           const Thresholds& thresholds);

}  // namespace synvol

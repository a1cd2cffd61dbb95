#include "synvol/pseudo.hpp"

namespace synvol {

namespace {

void require_same_dims(const ProbVolume& a, const ProbVolume& b) {
  if (a.dims() != b.dims()) {
    throw Error(ErrorCode::invariant,
                "pre/post probability dims differ: " + to_string(a.dims()) + " vs " + to_string(b.dims()));
  }
}

AnnotationSet class_points(const ProbVolume& prob, PointKind kind, const PseudoParams& params) {
  const auto detections =
      detect(prob, {params.thresholds.for_kind(kind), params.connectivity, params.min_size});
  std::vector<PointAnnotation> points;
  points.reserve(detections.size());
  PointId next = 1;
  for (const auto& d : detections) points.push_back({next++, kind, d.centroid, std::nullopt, d.voxel_count});
  return AnnotationSet(std::move(points), prob.dims());
}

}  // namespace

PseudoLabels generate_pseudo_labels(const ProbVolume& prob_pre, const ProbVolume& prob_post,
                                    const PseudoParams& params) {
  require_same_dims(prob_pre, prob_post);
  check_gamma(params.thresholds.gamma_pre);
  check_gamma(params.thresholds.gamma_post);
  auto points_pre = class_points(prob_pre, PointKind::pre, params);
  auto points_post = class_points(prob_post, PointKind::post, params);
  auto mask_pre = rasterize_squares(points_pre, PointKind::pre, prob_pre.dims(), params.radius);
  auto mask_post = rasterize_squares(points_post, PointKind::post, prob_post.dims(), params.radius);
  return {std::move(mask_pre), std::move(mask_post), std::move(points_pre), std::move(points_post)};
}

std::pair<MaskVolume, MaskVolume> pseudo_from_segmentation(const ProbVolume& prob_pre, const ProbVolume& prob_post,
                                                           const Thresholds& thresholds) {
  require_same_dims(prob_pre, prob_post);
  return {threshold(prob_pre, thresholds.gamma_pre), threshold(prob_post, thresholds.gamma_post)};
}

}  // namespace synvol

#include <doctest.h>

#include "synvol/detect.hpp"
#include "synvol/pseudo.hpp"
#include "synvol/synth.hpp"

using namespace synvol;

namespace {

std::vector<Coord> sorted(std::vector<Coord> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("defaults") {
  const PseudoParams p;
  CHECK(p.thresholds.gamma_pre == 0.75);
  CHECK(p.thresholds.gamma_post == 0.65);
  CHECK(p.radius == 3);
}

TEST_CASE("crisp cube input is a fixed point") {
  SceneSpec spec;
  spec.seed = 8;
  const auto scene = make_scene(spec);
  const auto pre = rasterize_squares(scene, PointKind::pre, spec.dims, 3);
  const auto post = rasterize_squares(scene, PointKind::post, spec.dims, 3);
  const auto labels = generate_pseudo_labels(to_prob(pre), to_prob(post), {});
  CHECK(labels.mask_pre == pre);
  CHECK(labels.mask_post == post);
  CHECK(sorted(labels.points_pre.positions(PointKind::pre)) == sorted(scene.positions(PointKind::pre)));
  CHECK(sorted(labels.points_post.positions(PointKind::post)) == sorted(scene.positions(PointKind::post)));

  // Applying the generator to its own output reproduces it.
  const auto again = generate_pseudo_labels(to_prob(labels.mask_pre), to_prob(labels.mask_post), {});
  CHECK(again.mask_pre == labels.mask_pre);
  CHECK(again.points_post == labels.points_post);

  const auto [seg_pre, seg_post] = pseudo_from_segmentation(to_prob(pre), to_prob(post), {});
  CHECK(seg_pre == labels.mask_pre);
  CHECK(seg_post == labels.mask_post);
}

TEST_CASE("noisy renders equal the composition of detect and rasterize") {
  SceneSpec spec;
  spec.seed = 19;
  const auto scene = make_scene(spec);
  const auto prob_pre = render_probability(scene.positions(PointKind::pre), spec.dims, 2.0, 0.3, 5);
  const auto prob_post = render_probability(scene.positions(PointKind::post), spec.dims, 2.0, 0.3, 6);
  const PseudoParams params;
  const auto labels = generate_pseudo_labels(prob_pre, prob_post, params);
  std::vector<Coord> pre_points, post_points;
  for (const auto& d : detect(prob_pre, {0.75, Connectivity::twenty_six, 1})) pre_points.push_back(d.centroid);
  for (const auto& d : detect(prob_post, {0.65, Connectivity::twenty_six, 1})) post_points.push_back(d.centroid);
  CHECK(labels.mask_pre == rasterize_squares(pre_points, spec.dims, 3));
  CHECK(labels.mask_post == rasterize_squares(post_points, spec.dims, 3));
  // Every foreground voxel is within Chebyshev R of an emitted point.
  const auto pts = labels.points_pre.positions(PointKind::pre);
  for (std::size_t i = 0; i < labels.mask_pre.size(); ++i) {
    if (!labels.mask_pre[i]) continue;
    const Coord v = spec.dims.coord(i);
    REQUIRE(std::any_of(pts.begin(), pts.end(), [&](Coord c) { return chebyshev_distance(v, c) <= 3; }));
  }
  // Ids are sequential from 1 within each class.
  for (std::size_t i = 0; i < labels.points_post.size(); ++i) CHECK(labels.points_post.points()[i].id == i + 1);
}

TEST_CASE("segmentation baseline keeps blob shape where regeneration squares it") {
  ProbVolume blob({16, 16, 16});
  for (std::int64_t x = 2; x < 14; ++x) blob.at({8, 8, x}) = 0.9f;  // a thin rod
  const ProbVolume empty({16, 16, 16});
  const auto [seg_pre, seg_post] = pseudo_from_segmentation(blob, empty, {});
  CHECK(seg_pre == threshold(blob, 0.75));
  CHECK(count_nonzero(seg_pre) == 12);
  CHECK(count_nonzero(seg_post) == 0);
  const auto labels = generate_pseudo_labels(blob, empty, {});
  CHECK(count_nonzero(labels.mask_pre) == 343);
  CHECK(labels.points_pre.positions(PointKind::pre) == std::vector<Coord>{{8, 8, 8}});
  CHECK(labels.mask_pre != seg_pre);
}

TEST_CASE("pseudo validates its parameters") {
  const ProbVolume a({4, 4, 4}), b({4, 4, 5});
  CHECK_THROWS_AS(generate_pseudo_labels(a, b, {}), Error);
  PseudoParams bad;
  bad.thresholds.gamma_pre = 1.0;
  CHECK_THROWS_AS(generate_pseudo_labels(a, a, bad), Error);
}

#include <doctest.h>

#include <fstream>
#include <random>

#include <json.hpp>

#include "support/oracles.hpp"
#include "synvol/report.hpp"
#include "synvol/score.hpp"

using namespace synvol;

namespace {

AnnotationSet swap_scene(bool swapped) {
  // Two pre/post pairs 20 voxels apart; the swapped variant links post 4 to pre 1.
  return AnnotationSet({{1, PointKind::pre, {10, 10, 10}, {}, {}},
                        {2, PointKind::pre, {10, 10, 30}, {}, {}},
                        {3, PointKind::post, {10, 14, 10}, PointId{1}, {}},
                        {4, PointKind::post, {10, 14, 30}, PointId{swapped ? 1u : 2u}, {}}});
}

}  // namespace

TEST_CASE("identical point sets match perfectly") {
  std::mt19937_64 rng(1);
  const auto sites = test::random_sites(12, 50, 1, rng);
  const auto r = assign(sites, sites);
  CHECK(r.tp == 12);
  CHECK(r.fp == 0);
  CHECK(r.fn == 0);
  CHECK(r.total_distance() == 0.0);
}

TEST_CASE("a pair beyond the cutoff is forbidden") {
  const std::vector<Site> pred{{1, {0, 0, 0}}};
  const std::vector<Site> gt{{2, {0, 0, 8}}};
  const auto r = assign(pred, gt, 7.0);
  CHECK(r.tp == 0);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(assign(pred, gt, 8.0).tp == 1);  // cutoff is inclusive
}

TEST_CASE("cardinality wins over distance") {
  // Greedy nearest would pair pred 1 with gt 10 and leave pred 2 unmatched.
  const std::vector<Site> pred{{1, {0, 0, 3}}, {2, {0, 0, 9}}};
  const std::vector<Site> gt{{10, {0, 0, 4}}, {11, {0, 0, 0}}};
  const auto r = assign(pred, gt, 5.0);
  CHECK(r.tp == 2);
  CHECK(r.total_distance() == doctest::Approx(3.0 + 5.0));
}

TEST_CASE("solve_assignment on small matrices") {
  CHECK(solve_assignment({{4, 1, 3}, {2, 0, 5}, {3, 2, 2}}) == std::vector<std::size_t>{1, 0, 2});
  CHECK(solve_assignment({{1, 2, 0}}) == std::vector<std::size_t>{2});
  CHECK(solve_assignment({}).empty());
  CHECK_THROWS_AS(solve_assignment({{1}, {2}}), Error);
}

TEST_CASE("assign equals exhaustive search on small scenes") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const auto preds = test::random_sites(rng() % 8, 20, 1, rng);
    const auto gts = test::random_sites(rng() % 8, 20, 100, rng);
    const double cutoff = 2.0 + static_cast<double>(rng() % 10);
    const auto got = assign(preds, gts, cutoff);
    const auto want = test::exhaustive_assignment(preds, gts, cutoff);
    REQUIRE(got.tp == want.tp);
    REQUIRE(got.total_distance() == doctest::Approx(want.total).epsilon(1e-9));
    REQUIRE(got.fp == preds.size() - got.tp);
    REQUIRE(got.fn == gts.size() - got.tp);
  }
}

TEST_CASE("assign is invariant under relabeling, translation and swapping sides") {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 50; ++trial) {
    auto preds = test::random_sites(1 + rng() % 30, 40, 1, rng);
    auto gts = test::random_sites(1 + rng() % 30, 40, 500, rng);
    const auto base = assign(preds, gts);
    const auto swapped = assign(gts, preds);
    CHECK(swapped.tp == base.tp);
    CHECK(swapped.fp == base.fn);
    CHECK(f1(swapped) == f1(base));
    for (auto& s : preds) s = {s.id * 3 + 7, {s.pos.z - 5, s.pos.y + 11, s.pos.x}};
    for (auto& s : gts) s = {s.id + 1000, {s.pos.z - 5, s.pos.y + 11, s.pos.x}};
    std::reverse(preds.begin(), preds.end());
    const auto moved = assign(preds, gts);
    CHECK(moved.tp == base.tp);
    CHECK(moved.total_distance() == doctest::Approx(base.total_distance()).epsilon(1e-9));
  }
}

TEST_CASE("f1 formula") {
  CHECK(f1(10, 0, 0) == 1.0);
  CHECK(f1(0, 5, 3) == 0.0);
  CHECK(f1(3, 1, 2) == doctest::Approx(6.0 / 9.0));
  CHECK(f1(0, 0, 0) == 1.0);
}

TEST_CASE("paired rule on the swap scene") {
  const auto gt = swap_scene(false);
  const auto good = score_volume(swap_scene(false), gt, kDefaultCutoff, true);
  const auto plain = score_volume(swap_scene(true), gt, kDefaultCutoff, false);
  const auto paired = score_volume(swap_scene(true), gt, kDefaultCutoff, true);
  CHECK(good.post.tp == 2);
  CHECK(good.f1 == 1.0);
  CHECK(plain.post.tp == 2);
  CHECK(paired.post.tp == plain.post.tp - 1);
  CHECK(paired.post.fp == plain.post.fp + 1);
  CHECK(paired.post.fn == plain.post.fn + 1);
  CHECK(paired.pre.tp == 2);
  CHECK(paired.f1_post == doctest::Approx(0.5));
}

TEST_CASE("paired rule requires the partner pre to be matched at all") {
  const AnnotationSet gt({{1, PointKind::pre, {10, 10, 10}, {}, {}}, {2, PointKind::post, {10, 13, 10}, PointId{1}, {}}});
  // Predicted pre is too far to match, so the post cannot be a paired TP.
  const AnnotationSet pred(
      {{5, PointKind::pre, {10, 10, 30}, {}, {}}, {6, PointKind::post, {10, 13, 10}, PointId{5}, {}}});
  const auto r = score_paired(pred, gt);
  CHECK(r.tp == 0);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  const AnnotationSet unlinked({{6, PointKind::post, {10, 13, 10}, {}, {}}});
  CHECK(score_paired(unlinked, gt).tp == 0);
}

TEST_CASE("aggregate reproduces the published per-volume arithmetic") {
  const std::vector<ClassF1> one{{"v", 0.7568, 0.4752}};
  CHECK(aggregate(one).mean_f1 == doctest::Approx(0.6160).epsilon(5e-4));
  const std::vector<ClassF1> perfect{{"v", 1.0, 1.0}};
  CHECK(aggregate(perfect).mean_f1 == 1.0);
  CHECK_THROWS_AS(aggregate(std::span<const ClassF1>{}), Error);

  const auto data = std::filesystem::path(SYNVOL_TEST_DATA);
  const auto stage1 = aggregate(load_f1_table(data / "published_stage1_f1.json"));
  const auto stage2 = aggregate(load_f1_table(data / "published_stage2_f1.json"));
  CHECK(stage1.volumes.size() == 9);
  CHECK(std::abs(stage1.mean_f1 - 0.5835) <= 5e-4);
  CHECK(std::abs(stage2.mean_f1 - 0.6160) <= 5e-4);
}

TEST_CASE("score report embeds config and counts") {
  const auto gt = swap_scene(false);
  const std::vector<VolumeScore> v{score_volume(swap_scene(true), gt, 7.0, true, "swap")};
  const auto text = score_report_json(v, aggregate(v), PipelineConfig{}, true);
  const auto j = nlohmann::json::parse(text);
  CHECK(j["config"]["gamma_pre"] == 0.75);
  CHECK(j["config"]["fg_weight"] == "auto");
  CHECK(j["paired"] == true);
  CHECK(j["volumes"][0]["name"] == "swap");
  CHECK(j["volumes"][0]["post"]["tp"] == 1);
  CHECK(j["mean"]["f1_pre"] == 1.0);
}

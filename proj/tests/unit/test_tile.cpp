#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "synvol/tile.hpp"

using namespace synvol;

TEST_CASE("plan for a volume equal to the patch is a single offset") {
  const auto plan = plan_patches({128, 128, 128}, {128, 128, 128});
  REQUIRE(plan.offsets.size() == 1);
  CHECK(plan.offsets[0] == Coord{0, 0, 0});
}

TEST_CASE("plan along a longer x axis") {
  const auto plan = plan_patches({128, 128, 192}, {128, 128, 128});
  REQUIRE(plan.offsets.size() == 2);
  CHECK(plan.offsets[0] == Coord{0, 0, 0});
  CHECK(plan.offsets[1] == Coord{0, 0, 64});
}

TEST_CASE("plan clamps the last offset to dim - patch") {
  CHECK(axis_offsets(130, 128) == std::vector<std::int64_t>{0, 2});
  CHECK(plan_patches({130, 130, 130}, {128, 128, 128}).offsets.size() == 8);
  CHECK(axis_offsets(10, 1) == std::vector<std::int64_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(axis_offsets(7, 3) == std::vector<std::int64_t>{0, 1, 2, 3, 4});
}

TEST_CASE("patch larger than the volume is a plan error") {
  try {
    plan_patches({64, 64, 64}, {128, 64, 64});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::plan);
  }
}

TEST_CASE("every plan covers every voxel") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    Dims vol{}, patch{};
    std::int64_t* v[3] = {&vol.d, &vol.h, &vol.w};
    std::int64_t* p[3] = {&patch.d, &patch.h, &patch.w};
    for (int a = 0; a < 3; ++a) {
      *v[a] = 1 + static_cast<std::int64_t>(rng() % 64);
      *p[a] = 1 + static_cast<std::int64_t>(rng() % *v[a]);
    }
    const auto plan = plan_patches(vol, patch);
    std::vector<int> hits(vol.voxels(), 0);
    for (const Coord o : plan.offsets)
      for (std::int64_t z = 0; z < patch.d; ++z)
        for (std::int64_t y = 0; y < patch.h; ++y)
          for (std::int64_t x = 0; x < patch.w; ++x) ++hits[vol.index({o.z + z, o.y + y, o.x + x})];
    REQUIRE(std::find(hits.begin(), hits.end(), 0) == hits.end());
  }
}

TEST_CASE("bump profile floor, symmetry and pinned value") {
  const auto four = bump_profile(4);
  const double expected = 1e-3 + (1.0 - 1e-3) * 0.5 * (1.0 - std::cos(std::numbers::pi / 4.0));
  CHECK(four[0] == doctest::Approx(expected).epsilon(1e-15));
  CHECK(four[0] == doctest::Approx(0.1473001628).epsilon(1e-9));
  for (std::int64_t n : {1, 2, 3, 7, 16, 33}) {
    const auto w = bump_profile(n);
    for (std::int64_t i = 0; i < n; ++i) {
      CHECK(w[i] >= kBumpFloor);
      CHECK(w[i] == doctest::Approx(w[n - 1 - i]).epsilon(1e-12));
    }
  }
  const BumpWeights weights({3, 4, 5});
  CHECK(weights.at({0, 1, 2}) == doctest::Approx(weights.at({2, 2, 2})));
}

TEST_CASE("blend of one patch covering the volume is the patch") {
  ProbVolume p({4, 5, 6});
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<float>(i % 7) / 7.0f;
  const std::vector<Patch> patches{{{0, 0, 0}, p}};
  CHECK(blend(patches, p.dims(), BumpWeights(p.dims())) == p);
}

TEST_CASE("blend of two 1D patches in their overlap") {
  const BumpWeights w({1, 1, 8});
  const float a = 0.2f, b = 0.9f;
  const std::vector<Patch> patches{{{0, 0, 0}, ProbVolume({1, 1, 8}, a)}, {{0, 0, 4}, ProbVolume({1, 1, 8}, b)}};
  const auto out = blend(patches, {1, 1, 12}, w);
  const auto& prof = w.profile(2);
  for (std::int64_t x = 0; x < 4; ++x) CHECK(out.at({0, 0, x}) == doctest::Approx(a));
  for (std::int64_t x = 4; x < 8; ++x) {
    const double w1 = prof[x], w2 = prof[x - 4];
    CHECK(out.at({0, 0, x}) == doctest::Approx((w1 * a + w2 * b) / (w1 + w2)).epsilon(1e-6));
  }
  // By hand: overlap index 4 sees profile[4] from the first patch and profile[0] from the second.
  const double p0 = 1e-3 + (1 - 1e-3) * 0.5 * (1 - std::cos(2 * std::numbers::pi * 0.5 / 8));
  const double p4 = 1e-3 + (1 - 1e-3) * 0.5 * (1 - std::cos(2 * std::numbers::pi * 4.5 / 8));
  CHECK(out.at({0, 0, 4}) == doctest::Approx((p4 * a + p0 * b) / (p4 + p0)).epsilon(1e-6));
  for (std::int64_t x = 8; x < 12; ++x) CHECK(out.at({0, 0, x}) == doctest::Approx(b));
}

TEST_CASE("blend rejects gaps and mismatched patches") {
  const BumpWeights w({1, 1, 4});
  const std::vector<Patch> gap{{{0, 0, 0}, ProbVolume({1, 1, 4}, 0.5f)}};
  try {
    blend(gap, {1, 1, 8}, w);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::plan);
  }
  const std::vector<Patch> wrong{{{0, 0, 0}, ProbVolume({1, 1, 3}, 0.5f)}};
  CHECK_THROWS_AS(blend(wrong, {1, 1, 4}, w), Error);
}

TEST_CASE("blending constant patches reproduces the constant and stays within bounds") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Dims vol{8 + static_cast<std::int64_t>(rng() % 40), 8 + static_cast<std::int64_t>(rng() % 40),
                   8 + static_cast<std::int64_t>(rng() % 40)};
    const Dims patch{2 + static_cast<std::int64_t>(rng() % (vol.d - 1)),
                     2 + static_cast<std::int64_t>(rng() % (vol.h - 1)),
                     2 + static_cast<std::int64_t>(rng() % (vol.w - 1))};
    const auto plan = plan_patches(vol, {std::min(patch.d, vol.d), std::min(patch.h, vol.h), std::min(patch.w, vol.w)});
    const auto out = infer_tiled(plan, [](Coord, Dims p) { return ProbVolume(p, 0.37f); });
    for (float v : out.values()) REQUIRE(std::abs(v - 0.37) <= 1e-6);

    ProbVolume source(vol);
    for (auto& v : source.values()) v = static_cast<float>(rng() % 1000) / 999.0f;
    const auto tiled = infer_tiled(plan, [&](Coord o, Dims p) { return crop(source, o, p); });
    for (std::size_t i = 0; i < tiled.size(); ++i) REQUIRE(std::abs(tiled[i] - source[i]) <= 1e-6);
  }
}

TEST_CASE("blend output does not depend on patch order") {
  const Dims vol{20, 20, 20};
  const auto plan = plan_patches(vol, {8, 8, 8});
  std::vector<Patch> patches;
  std::mt19937_64 rng(2);
  for (const Coord o : plan.offsets) {
    ProbVolume p({8, 8, 8});
    for (auto& v : p.values()) v = static_cast<float>(rng() % 100) / 99.0f;
    patches.push_back({o, p});
  }
  const BumpWeights w({8, 8, 8});
  const auto forward = blend(patches, vol, w);
  std::reverse(patches.begin(), patches.end());
  const auto backward = blend(patches, vol, w);
  for (std::size_t i = 0; i < forward.size(); ++i) REQUIRE(std::abs(forward[i] - backward[i]) <= 1e-6);
}

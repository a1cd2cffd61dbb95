#include "synvol/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace synvol {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr int kPreAttempts = 2000;
constexpr int kPostAttempts = 200;

class SceneRng {
 public:
  explicit SceneRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [lo, hi]; modulo bias is below 2^-40 for any extent here.
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

 private:
  std::mt19937_64 engine_;
};

void check_spec(const SceneSpec& s) {
  require_positive(s.dims, "scene dims");
  if (s.n_pairs < 0) throw Error(ErrorCode::range, "n_pairs must be >= 0");
  if (s.min_spacing < 0) throw Error(ErrorCode::range, "min_spacing must be >= 0");
  if (s.margin < 0) throw Error(ErrorCode::range, "margin must be >= 0");
  if (!(s.pair_offset_min >= 0.0 && s.pair_offset_max >= s.pair_offset_min)) {
    throw Error(ErrorCode::range, "pair offset range must satisfy 0 <= min <= max");
  }
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

AnnotationSet make_scene(const SceneSpec& spec) {
  check_spec(spec);
  const auto n = static_cast<std::size_t>(spec.n_pairs);
  if (n == 0) return AnnotationSet({}, spec.dims);

  const Coord lo{spec.margin, spec.margin, spec.margin};
  const Coord hi{spec.dims.d - 1 - spec.margin, spec.dims.h - 1 - spec.margin, spec.dims.w - 1 - spec.margin};
  if (hi.z < lo.z || hi.y < lo.y || hi.x < lo.x) {
    throw Error(ErrorCode::placement, "margin " + std::to_string(spec.margin) + " leaves no room in " +
                                          to_string(spec.dims));
  }
  auto inside = [&](Coord c) {
    return c.z >= lo.z && c.y >= lo.y && c.x >= lo.x && c.z <= hi.z && c.y <= hi.y && c.x <= hi.x;
  };
  auto spaced = [&](Coord c, const std::vector<Coord>& others) {
    return std::all_of(others.begin(), others.end(),
                       [&](Coord o) { return chebyshev_distance(c, o) >= spec.min_spacing; });
  };

  const auto reach = static_cast<std::int64_t>(std::floor(spec.pair_offset_max));
  const double min2 = spec.pair_offset_min * spec.pair_offset_min;
  const double max2 = spec.pair_offset_max * spec.pair_offset_max;

  SceneRng rng(spec.seed);
  std::vector<Coord> pres, posts;
  pres.reserve(n);
  posts.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kPreAttempts && !placed; ++attempt) {
      const Coord pre{rng.between(lo.z, hi.z), rng.between(lo.y, hi.y), rng.between(lo.x, hi.x)};
      if (!spaced(pre, pres)) continue;
      // The new pre must not steal any existing post from its partner
      // (a tie keeps the partner, which has the lower id).
      bool steals = false;
      for (std::size_t j = 0; j < posts.size() && !steals; ++j) {
        steals = squared_distance(posts[j], pre) < squared_distance(posts[j], pres[j]);
      }
      if (steals) continue;
      for (int k = 0; k < kPostAttempts; ++k) {
        const Coord off{rng.between(-reach, reach), rng.between(-reach, reach), rng.between(-reach, reach)};
        const auto len2 = static_cast<double>(off.z * off.z + off.y * off.y + off.x * off.x);
        if (len2 < min2 || len2 > max2) continue;
        const Coord post = pre + off;
        if (!inside(post) || !spaced(post, posts)) continue;
        // Every earlier pre has a lower id, so it must be strictly farther.
        const auto own = squared_distance(post, pre);
        const bool nearest_is_own = std::all_of(pres.begin(), pres.end(),
                                                [&](Coord other) { return squared_distance(post, other) > own; });
        if (!nearest_is_own) continue;
        pres.push_back(pre);
        posts.push_back(post);
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw Error(ErrorCode::placement, "could not place pair " + std::to_string(i + 1) + " of " +
                                            std::to_string(n) + " in " + to_string(spec.dims) +
                                            " with min_spacing " + std::to_string(spec.min_spacing));
    }
  }

  std::vector<PointAnnotation> points;
  points.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) points.push_back({i + 1, PointKind::pre, pres[i], std::nullopt, std::nullopt});
  for (std::size_t i = 0; i < n; ++i) points.push_back({n + i + 1, PointKind::post, posts[i], i + 1, std::nullopt});
  return AnnotationSet(std::move(points), spec.dims);
}

ProbVolume render_probability(std::span<const Coord> centers, Dims dims, double sigma, double noise_amp,
                              std::uint64_t seed) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::range, "sigma must be > 0");
  if (!(noise_amp >= 0.0 && noise_amp < 0.5)) throw Error(ErrorCode::range, "noise amplitude must lie in [0, 0.5)");
  ProbVolume out(dims);
  const double cut = kRenderTruncation * sigma;
  const double cut2 = cut * cut;
  const auto r = static_cast<std::int64_t>(std::floor(cut));
  const double inv = 1.0 / (2.0 * sigma * sigma);
  // Fixed accumulation order (centers in input order) keeps sums reproducible.
  for (const Coord c : centers) {
    for (auto z = std::max<std::int64_t>(0, c.z - r); z <= std::min(dims.d - 1, c.z + r); ++z) {
      for (auto y = std::max<std::int64_t>(0, c.y - r); y <= std::min(dims.h - 1, c.y + r); ++y) {
        for (auto x = std::max<std::int64_t>(0, c.x - r); x <= std::min(dims.w - 1, c.x + r); ++x) {
          const auto d2 = static_cast<double>(squared_distance({z, y, x}, c));
          if (d2 > cut2) continue;
          out.at({z, y, x}) += static_cast<float>(std::exp(-d2 * inv));
        }
      }
    }
  }
  auto values = out.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    double v = values[i];
    if (noise_amp > 0.0) v += noise_amp * unit_interval(splitmix64(seed + i * kGolden));
    values[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return out;
}

}  // namespace synvol

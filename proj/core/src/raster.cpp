#include "synvol/raster.hpp"

#include <algorithm>
#include <limits>

namespace synvol {

namespace {

void check_radius(int radius) {
  if (radius < 0) throw Error(ErrorCode::range, "radius must be >= 0, got " + std::to_string(radius));
}

void check_in_bounds(Coord c, Dims dims) {
  if (!dims.contains(c)) {
    throw Error(ErrorCode::invariant, "point " + to_string(c) + " outside volume " + to_string(dims));
  }
}

struct Box {
  Coord lo;
  Coord hi;  // inclusive
};

Box clipped_cube(Coord c, Dims dims, std::int64_t r) {
  return {{std::max<std::int64_t>(c.z - r, 0), std::max<std::int64_t>(c.y - r, 0), std::max<std::int64_t>(c.x - r, 0)},
          {std::min(c.z + r, dims.d - 1), std::min(c.y + r, dims.h - 1), std::min(c.x + r, dims.w - 1)}};
}

}  // namespace

MaskVolume rasterize_squares(std::span<const Coord> centers, Dims dims, int radius) {
  check_radius(radius);
  MaskVolume mask(dims);
  for (const Coord c : centers) check_in_bounds(c, dims);
  for (const Coord c : centers) {
    const Box box = clipped_cube(c, dims, radius);
    for (auto z = box.lo.z; z <= box.hi.z; ++z) {
      for (auto y = box.lo.y; y <= box.hi.y; ++y) {
        auto* row = &mask.at({z, y, 0});
        std::fill(row + box.lo.x, row + box.hi.x + 1, std::uint8_t{1});
      }
    }
  }
  return mask;
}

MaskVolume rasterize_squares(const AnnotationSet& points, PointKind kind, Dims dims, int radius) {
  const auto centers = points.positions(kind);
  return rasterize_squares(centers, dims, radius);
}

LabelVolume rasterize_instances(std::span<const Site> points, Dims dims, int radius) {
  check_radius(radius);
  LabelVolume labels(dims);
  for (const auto& p : points) {
    check_in_bounds(p.pos, dims);
    if (p.id == 0) throw Error(ErrorCode::invariant, "instance ids must be nonzero (0 is background)");
    if (p.id > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::range, "instance id " + std::to_string(p.id) + " exceeds label range");
    }
  }
  // Winning squared distance per labelled voxel.
  std::vector<std::int64_t> best(labels.size(), std::numeric_limits<std::int64_t>::max());
  for (const auto& p : points) {
    const Box box = clipped_cube(p.pos, dims, radius);
    const auto id = static_cast<std::uint32_t>(p.id);
    for (auto z = box.lo.z; z <= box.hi.z; ++z) {
      for (auto y = box.lo.y; y <= box.hi.y; ++y) {
        for (auto x = box.lo.x; x <= box.hi.x; ++x) {
          const std::size_t i = dims.index({z, y, x});
          const auto d2 = squared_distance({z, y, x}, p.pos);
          if (d2 < best[i] || (d2 == best[i] && id < labels[i])) {
            best[i] = d2;
            labels[i] = id;
          }
        }
      }
    }
  }
  return labels;
}

}  // namespace synvol

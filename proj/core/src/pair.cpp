#include "synvol/pair.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace synvol {

namespace {

// (distance, id) ordering used for every nearest decision.
bool closer(std::int64_t d2, PointId id, std::int64_t best_d2, PointId best_id) {
  return d2 < best_d2 || (d2 == best_d2 && id < best_id);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  const std::int64_t q = a / b;
  return (a % b != 0 && a < 0) ? q - 1 : q;
}

void require_pres(std::span<const Site> posts, std::span<const Site> pres) {
  if (!posts.empty() && pres.empty()) {
    throw Error(ErrorCode::invariant, "cannot pair " + std::to_string(posts.size()) + " posts without any pre");
  }
}

}  // namespace

Pairing match_nearest_scan(std::span<const Site> posts, std::span<const Site> pres) {
  require_pres(posts, pres);
  Pairing out;
  out.assignments.reserve(posts.size());
  for (const auto& post : posts) {
    const Site* best = nullptr;
    std::int64_t best_d2 = 0;
    for (const auto& pre : pres) {
      const auto d2 = squared_distance(post.pos, pre.pos);
      if (!best || closer(d2, pre.id, best_d2, best->id)) {
        best = &pre;
        best_d2 = d2;
      }
    }
    out.assignments.push_back({post.id, best->id, std::sqrt(static_cast<double>(best_d2))});
  }
  return out;
}

PointGrid::PointGrid(std::span<const Site> points) {
  if (points.empty()) return;
  Coord lo = points.front().pos, hi = lo;
  for (const auto& p : points) {
    lo = {std::min(lo.z, p.pos.z), std::min(lo.y, p.pos.y), std::min(lo.x, p.pos.x)};
    hi = {std::max(hi.z, p.pos.z), std::max(hi.y, p.pos.y), std::max(hi.x, p.pos.x)};
  }
  origin_ = lo;
  const double extent = static_cast<double>(hi.z - lo.z + 1) * static_cast<double>(hi.y - lo.y + 1) *
                        static_cast<double>(hi.x - lo.x + 1);
  // About two points per cell on average.
  const double per_cell = extent / std::max<double>(1.0, static_cast<double>(points.size()) / 2.0);
  cell_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::cbrt(per_cell))));
  cells_ = {(hi.z - lo.z) / cell_ + 1, (hi.y - lo.y) / cell_ + 1, (hi.x - lo.x) / cell_ + 1};

  const auto n_cells = static_cast<std::size_t>(cells_.z * cells_.y * cells_.x);
  auto cell_index = [&](Coord c) {
    return static_cast<std::size_t>((cell_of(c.z, 0) * cells_.y + cell_of(c.y, 1)) * cells_.x + cell_of(c.x, 2));
  };
  start_.assign(n_cells + 1, 0);
  for (const auto& p : points) ++start_[cell_index(p.pos) + 1];
  for (std::size_t i = 0; i < n_cells; ++i) start_[i + 1] += start_[i];
  points_.resize(points.size());
  std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
  for (const auto& p : points) points_[fill[cell_index(p.pos)]++] = p;
}

std::int64_t PointGrid::cell_of(std::int64_t v, int axis) const {
  const std::int64_t o = axis == 0 ? origin_.z : axis == 1 ? origin_.y : origin_.x;
  return floor_div(v - o, cell_);
}

const Site& PointGrid::nearest(Coord q) const {
  if (points_.empty()) throw Error(ErrorCode::invariant, "nearest query on an empty grid");
  const Coord qc{cell_of(q.z, 0), cell_of(q.y, 1), cell_of(q.x, 2)};
  // Rings beyond this radius cannot intersect the grid.
  const std::int64_t max_ring = std::max({std::max(qc.z, cells_.z - 1 - qc.z), std::max(qc.y, cells_.y - 1 - qc.y),
                                          std::max(qc.x, cells_.x - 1 - qc.x)});
  const Site* best = nullptr;
  std::int64_t best_d2 = std::numeric_limits<std::int64_t>::max();

  auto scan_cell = [&](std::int64_t cz, std::int64_t cy, std::int64_t cx) {
    const auto c = static_cast<std::size_t>((cz * cells_.y + cy) * cells_.x + cx);
    for (auto k = start_[c]; k < start_[c + 1]; ++k) {
      const Site& s = points_[k];
      const auto d2 = squared_distance(q, s.pos);
      if (!best || closer(d2, s.id, best_d2, best->id)) {
        best = &s;
        best_d2 = d2;
      }
    }
  };

  for (std::int64_t r = 0; r <= max_ring; ++r) {
    const std::int64_t z0 = std::max<std::int64_t>(0, qc.z - r), z1 = std::min(cells_.z - 1, qc.z + r);
    const std::int64_t y0 = std::max<std::int64_t>(0, qc.y - r), y1 = std::min(cells_.y - 1, qc.y + r);
    for (std::int64_t cz = z0; cz <= z1; ++cz) {
      for (std::int64_t cy = y0; cy <= y1; ++cy) {
        const bool shell = std::abs(cz - qc.z) == r || std::abs(cy - qc.y) == r;
        if (shell) {
          const std::int64_t x0 = std::max<std::int64_t>(0, qc.x - r), x1 = std::min(cells_.x - 1, qc.x + r);
          for (std::int64_t cx = x0; cx <= x1; ++cx) scan_cell(cz, cy, cx);
        } else {
          if (qc.x - r >= 0 && qc.x - r < cells_.x) scan_cell(cz, cy, qc.x - r);
          if (r > 0 && qc.x + r >= 0 && qc.x + r < cells_.x) scan_cell(cz, cy, qc.x + r);
        }
      }
    }
    // Any point in ring r+1 differs from q by at least r*cell+1 along some axis.
    if (best) {
      const std::int64_t bound = r * cell_ + 1;
      if (bound * bound > best_d2) break;
    }
  }
  return *best;
}

Pairing match_nearest(std::span<const Site> posts, std::span<const Site> pres) {
  require_pres(posts, pres);
  Pairing out;
  if (posts.empty()) return out;
  const PointGrid grid(pres);
  out.assignments.reserve(posts.size());
  for (const auto& post : posts) {
    const Site& pre = grid.nearest(post.pos);
    out.assignments.push_back({post.id, pre.id, euclidean_distance(post.pos, pre.pos)});
  }
  return out;
}

AnnotationSet combine_pairs(const AnnotationSet& pres, const AnnotationSet& posts, const Pairing& pairing) {
  PointId shift = 0;
  std::vector<PointAnnotation> points;
  for (const auto& p : pres.points()) {
    if (p.kind != PointKind::pre) throw Error(ErrorCode::invariant, "pre set contains a post point");
    shift = std::max(shift, p.id);
    points.push_back({p.id, PointKind::pre, p.pos, std::nullopt, p.voxel_count});
  }
  std::unordered_map<PointId, PointId> partner;
  for (const auto& a : pairing.assignments) partner[a.post_id] = a.pre_id;
  for (const auto& p : posts.points()) {
    if (p.kind != PointKind::post) throw Error(ErrorCode::invariant, "post set contains a pre point");
    PointAnnotation q{p.id + shift, PointKind::post, p.pos, std::nullopt, p.voxel_count};
    if (const auto it = partner.find(p.id); it != partner.end()) q.partner_id = it->second;
    points.push_back(q);
  }
  auto dims = pres.dims() ? pres.dims() : posts.dims();
  return AnnotationSet(std::move(points), dims);
}

Pairing pairing_of(const AnnotationSet& combined) {
  Pairing out;
  for (const auto& p : combined.points()) {
    if (p.kind != PointKind::post || !p.partner_id) continue;
    const auto* pre = combined.find(*p.partner_id);
    out.assignments.push_back({p.id, pre->id, euclidean_distance(p.pos, pre->pos)});
  }
  return out;
}

}  // namespace synvol

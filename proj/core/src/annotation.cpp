#include "synvol/annotation.hpp"

#include <algorithm>
#include <unordered_map>

namespace synvol {

std::string_view to_string(PointKind kind) noexcept {
  return kind == PointKind::pre ? "pre" : "post";
}

PointKind point_kind_from_string(std::string_view s) {
  if (s == "pre") return PointKind::pre;
  if (s == "post") return PointKind::post;
  throw Error(ErrorCode::format, "unknown point kind '" + std::string(s) + "'");
}

AnnotationSet::AnnotationSet(std::vector<PointAnnotation> points, std::optional<Dims> dims)
    : points_(std::move(points)), dims_(dims) {
  std::unordered_map<PointId, PointKind> kinds;
  kinds.reserve(points_.size());
  for (const auto& p : points_) {
    if (!kinds.emplace(p.id, p.kind).second) {
      throw Error(ErrorCode::invariant, "duplicate point id " + std::to_string(p.id));
    }
    if (dims_ && !dims_->contains(p.pos)) {
      throw Error(ErrorCode::invariant, "point " + std::to_string(p.id) + " at " + to_string(p.pos) +
                                            " outside volume " + to_string(*dims_));
    }
    if (p.pos.z < 0 || p.pos.y < 0 || p.pos.x < 0) {
      throw Error(ErrorCode::invariant,
                  "point " + std::to_string(p.id) + " has negative position " + to_string(p.pos));
    }
  }
  for (const auto& p : points_) {
    if (!p.partner_id) continue;
    const auto it = kinds.find(*p.partner_id);
    if (it == kinds.end()) {
      throw Error(ErrorCode::invariant, "point " + std::to_string(p.id) + " has dangling partner " +
                                            std::to_string(*p.partner_id));
    }
    if (it->second == p.kind) {
      throw Error(ErrorCode::invariant, "point " + std::to_string(p.id) + " partner " +
                                            std::to_string(*p.partner_id) + " has the same kind");
    }
  }
}

AnnotationSet AnnotationSet::bound_to(Dims dims) const { return AnnotationSet(points_, dims); }

const PointAnnotation* AnnotationSet::find(PointId id) const {
  const auto it = std::find_if(points_.begin(), points_.end(), [id](const auto& p) { return p.id == id; });
  return it == points_.end() ? nullptr : &*it;
}

std::vector<PointAnnotation> AnnotationSet::of_kind(PointKind kind) const {
  std::vector<PointAnnotation> out;
  std::copy_if(points_.begin(), points_.end(), std::back_inserter(out),
               [kind](const auto& p) { return p.kind == kind; });
  return out;
}

std::vector<Site> AnnotationSet::sites(PointKind kind) const {
  std::vector<Site> out;
  for (const auto& p : points_) {
    if (p.kind == kind) out.push_back({p.id, p.pos});
  }
  return out;
}

std::vector<Coord> AnnotationSet::positions(PointKind kind) const {
  std::vector<Coord> out;
  for (const auto& p : points_) {
    if (p.kind == kind) out.push_back(p.pos);
  }
  return out;
}

std::vector<Site> to_sites(std::span<const PointAnnotation> points) {
  std::vector<Site> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back({p.id, p.pos});
  return out;
}

}  // namespace synvol

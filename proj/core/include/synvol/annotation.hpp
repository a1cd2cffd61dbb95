#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "synvol/volume.hpp"

namespace synvol {

using PointId = std::uint64_t;

enum class PointKind { pre, post };

std::string_view to_string(PointKind kind) noexcept;
PointKind point_kind_from_string(std::string_view s);
constexpr PointKind opposite(PointKind k) { return k == PointKind::pre ? PointKind::post : PointKind::pre; }

struct PointAnnotation {
  PointId id = 0;
  PointKind kind = PointKind::pre;
  Coord pos;
  std::optional<PointId> partner_id;
  // Component size for points produced by detection; not part of the invariants.
  std::optional<std::uint64_t> voxel_count;

  friend bool operator==(const PointAnnotation&, const PointAnnotation&) = default;
};

/// A position with an id, the common currency of pairing and scoring.
struct Site {
  PointId id = 0;
  Coord pos;

  friend bool operator==(const Site&, const Site&) = default;
};

/// Point annotations of one volume. Ids are unique across both kinds and
/// partner links always reference an existing point of the opposite kind.
class AnnotationSet {
 public:
  AnnotationSet() = default;

  /// Validates ids, partner links and, when dims are given, bounds.
  explicit AnnotationSet(std::vector<PointAnnotation> points, std::optional<Dims> dims = std::nullopt);

  const std::vector<PointAnnotation>& points() const { return points_; }
  const std::optional<Dims>& dims() const { return dims_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  /// Re-checks bounds against a volume extent and binds it.
  AnnotationSet bound_to(Dims dims) const;

  const PointAnnotation* find(PointId id) const;

  std::vector<PointAnnotation> of_kind(PointKind kind) const;
  std::vector<Site> sites(PointKind kind) const;
  std::vector<Coord> positions(PointKind kind) const;

  friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;

 private:
  std::vector<PointAnnotation> points_;
  std::optional<Dims> dims_;
};

std::vector<Site> to_sites(std::span<const PointAnnotation> points);

}  // namespace synvol

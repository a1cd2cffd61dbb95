#pragma once

// Post -> pre partner assignment by the distance-nearest principle.

#include <span>
#include <vector>

#include "synvol/annotation.hpp"

namespace synvol {

struct Assignment {
  PointId post_id = 0;
  PointId pre_id = 0;
  double distance = 0.0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// One entry per post, in input order. Many posts may share a pre.
struct Pairing {
  std::vector<Assignment> assignments;

  friend bool operator==(const Pairing&, const Pairing&) = default;
};

/// Nearest pre by Euclidean distance, ties to the lower pre id. Uses a
/// uniform grid over the pres; agrees exactly with match_nearest_scan.
Pairing match_nearest(std::span<const Site> posts, std::span<const Site> pres);

/// Reference O(posts * pres) linear scan.
Pairing match_nearest_scan(std::span<const Site> posts, std::span<const Site> pres);

/// Uniform bucket grid over a fixed point set answering exact nearest queries.
class PointGrid {
 public:
  explicit PointGrid(std::span<const Site> points);

  /// Nearest point, ties to the lower id. The grid must be non-empty.
  const Site& nearest(Coord q) const;

 private:
  std::int64_t cell_of(std::int64_t v, int axis) const;

  std::vector<Site> points_;
  Coord origin_;
  std::int64_t cell_ = 1;
  Coord cells_;  // grid extent in cells per axis
  std::vector<std::uint32_t> start_;  // CSR offsets into points_, one per cell + 1
};

/// Merges separately detected pres and posts into one annotation set with
/// partner links from `pairing`. Pre ids are kept; post ids are shifted by
/// the largest pre id so ids stay unique.
AnnotationSet combine_pairs(const AnnotationSet& pres, const AnnotationSet& posts, const Pairing& pairing);

/// Pairing from the partner links stored on the post points of a combined set.
Pairing pairing_of(const AnnotationSet& combined);

}  // namespace synvol

#pragma once

// Detection scoring: optimal one-to-one matching under a distance cutoff,
// class-wise F1, the paired-partner rule for posts, and averaging over volumes.

#include <span>
#include <string>
#include <vector>

#include "synvol/annotation.hpp"

namespace synvol {

/// Default match cutoff in voxels, one cube side (2R+1) at R = 3.
inline constexpr double kDefaultCutoff = 7.0;

struct Match {
  PointId pred_id = 0;
  PointId gt_id = 0;
  double distance = 0.0;

  friend bool operator==(const Match&, const Match&) = default;
};

struct MatchResult {
  std::vector<Match> matches;  // sorted by pred id
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double total_distance() const;
};

/// Among matchings that only use pairs within `cutoff`, picks one of maximum
/// cardinality and, among those, minimum total Euclidean distance.
MatchResult assign(std::span<const Site> preds, std::span<const Site> gts, double cutoff = kDefaultCutoff);

/// Minimum-cost assignment of every row of a rows x cols matrix (rows <= cols).
/// Returns the column chosen for each row.
std::vector<std::size_t> solve_assignment(const std::vector<std::vector<double>>& cost);

/// 2tp / (2tp + fp + fn); 1.0 when all three are zero.
double f1(std::size_t tp, std::size_t fp, std::size_t fn);
inline double f1(const MatchResult& r) { return f1(r.tp, r.fp, r.fn); }

/// Post-class scoring that also requires the partners to agree: a geometric
/// post match stays a TP only if the predicted post's partner pre is matched
/// (in the pre-class assignment) to the gt post's partner pre.
MatchResult score_paired(const AnnotationSet& pred, const AnnotationSet& gt, double cutoff = kDefaultCutoff);

struct VolumeScore {
  std::string name;
  MatchResult pre;
  MatchResult post;
  double f1_pre = 0.0;
  double f1_post = 0.0;
  double f1 = 0.0;
};

/// Scores one volume of combined pre+post sets. With `paired`, the post class
/// uses score_paired.
VolumeScore score_volume(const AnnotationSet& pred, const AnnotationSet& gt, double cutoff, bool paired,
                         std::string name = {});

struct VolumeF1 {
  std::string name;
  double f1_pre = 0.0;
  double f1_post = 0.0;
  double f1 = 0.0;  // mean of the two class scores
};

struct ScoreReport {
  std::vector<VolumeF1> volumes;
  double mean_f1_pre = 0.0;
  double mean_f1_post = 0.0;
  double mean_f1 = 0.0;
};

struct ClassF1 {
  std::string name;
  double f1_pre = 0.0;
  double f1_post = 0.0;
};

/// Per-volume F1 = mean of the class scores; report means are arithmetic
/// means over volumes. Throws on an empty list.
ScoreReport aggregate(std::span<const ClassF1> per_volume);
ScoreReport aggregate(std::span<const VolumeScore> per_volume);

}  // namespace synvol

#include "synvol/score.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace synvol {

double MatchResult::total_distance() const {
  double sum = 0.0;
  for (const auto& m : matches) sum += m.distance;
  return sum;
}

// Shortest augmenting path Hungarian method with row/column potentials,
// O(rows^2 * cols).
std::vector<std::size_t> solve_assignment(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  if (n == 0) return {};
  const std::size_t m = cost.front().size();
  if (m < n) throw Error(ErrorCode::invariant, "assignment needs rows <= cols");
  constexpr double inf = std::numeric_limits<double>::infinity();

  // 1-based; column 0 is the virtual start.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> row_of(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    row_of[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = row_of[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      row_of[j0] = row_of[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> col_of_row(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (row_of[j] != 0) col_of_row[row_of[j] - 1] = j - 1;
  }
  return col_of_row;
}

namespace {

class Components {
 public:
  explicit Components(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

struct Edge {
  std::size_t pred;
  std::size_t gt;
  double distance;
};

// All (pred, gt) pairs within cutoff, found through a hash grid of cutoff-sized cells.
std::vector<Edge> admissible_edges(std::span<const Site> preds, std::span<const Site> gts, double cutoff) {
  const auto cell = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(cutoff)));
  auto key = [cell](Coord c) {
    auto f = [cell](std::int64_t v) { return (v >= 0 ? v / cell : -((-v + cell - 1) / cell)); };
    return Coord{f(c.z), f(c.y), f(c.x)};
  };
  auto hash = [](const Coord& c) {
    return std::hash<std::int64_t>{}(c.z * 73856093 ^ c.y * 19349663 ^ c.x * 83492791);
  };
  std::unordered_map<Coord, std::vector<std::size_t>, decltype(hash)> buckets(gts.size() * 2 + 1, hash);
  for (std::size_t g = 0; g < gts.size(); ++g) buckets[key(gts[g].pos)].push_back(g);

  std::vector<Edge> edges;
  for (std::size_t p = 0; p < preds.size(); ++p) {
    const Coord k = key(preds[p].pos);
    for (std::int64_t dz = -1; dz <= 1; ++dz)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
          const auto it = buckets.find(k + Coord{dz, dy, dx});
          if (it == buckets.end()) continue;
          for (const std::size_t g : it->second) {
            const double d = euclidean_distance(preds[p].pos, gts[g].pos);
            if (d <= cutoff) edges.push_back({p, g, d});
          }
        }
  }
  return edges;
}

}  // namespace

MatchResult assign(std::span<const Site> preds, std::span<const Site> gts, double cutoff) {
  if (!(cutoff > 0.0)) throw Error(ErrorCode::range, "match cutoff must be > 0");
  MatchResult result;
  const auto edges = admissible_edges(preds, gts, cutoff);

  // Independent sub-problems: connected components of the admissible graph.
  const std::size_t np = preds.size();
  Components comp(np + gts.size());
  for (const auto& e : edges) comp.unite(e.pred, np + e.gt);
  std::unordered_map<std::size_t, std::vector<const Edge*>> groups;
  for (const auto& e : edges) groups[comp.find(e.pred)].push_back(&e);

  for (auto& [root, group] : groups) {
    std::vector<std::size_t> rows, cols;
    for (const Edge* e : group) {
      rows.push_back(e->pred);
      cols.push_back(e->gt);
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    const bool transpose = rows.size() > cols.size();
    if (transpose) std::swap(rows, cols);

    // A forbidden pair costs more than any complete set of admissible ones, so
    // the optimum maximizes cardinality first.
    const double forbidden = cutoff * static_cast<double>(rows.size() + 1) + 1.0;
    std::vector<std::vector<double>> cost(rows.size(), std::vector<double>(cols.size(), forbidden));
    auto index_in = [](const std::vector<std::size_t>& v, std::size_t x) {
      return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
    };
    for (const Edge* e : group) {
      const std::size_t r = index_in(rows, transpose ? e->gt : e->pred);
      const std::size_t c = index_in(cols, transpose ? e->pred : e->gt);
      cost[r][c] = e->distance;
    }
    const auto choice = solve_assignment(cost);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const std::size_t c = choice[r];
      if (cost[r][c] >= forbidden) continue;
      const std::size_t p = transpose ? cols[c] : rows[r];
      const std::size_t g = transpose ? rows[r] : cols[c];
      result.matches.push_back({preds[p].id, gts[g].id, cost[r][c]});
    }
  }
  std::sort(result.matches.begin(), result.matches.end(),
            [](const Match& a, const Match& b) { return a.pred_id < b.pred_id; });
  result.tp = result.matches.size();
  result.fp = preds.size() - result.tp;
  result.fn = gts.size() - result.tp;
  return result;
}

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp == 0 && fp == 0 && fn == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

MatchResult score_paired(const AnnotationSet& pred, const AnnotationSet& gt, double cutoff) {
  const auto pre_match = assign(pred.sites(PointKind::pre), gt.sites(PointKind::pre), cutoff);
  std::unordered_map<PointId, PointId> gt_pre_of;
  for (const auto& m : pre_match.matches) gt_pre_of[m.pred_id] = m.gt_id;

  const auto pred_posts = pred.sites(PointKind::post);
  const auto gt_posts = gt.sites(PointKind::post);
  MatchResult geometric = assign(pred_posts, gt_posts, cutoff);

  MatchResult out;
  for (const auto& m : geometric.matches) {
    const auto& pred_partner = pred.find(m.pred_id)->partner_id;
    const auto& gt_partner = gt.find(m.gt_id)->partner_id;
    if (!pred_partner || !gt_partner) continue;
    const auto it = gt_pre_of.find(*pred_partner);
    if (it != gt_pre_of.end() && it->second == *gt_partner) out.matches.push_back(m);
  }
  out.tp = out.matches.size();
  out.fp = pred_posts.size() - out.tp;
  out.fn = gt_posts.size() - out.tp;
  return out;
}

VolumeScore score_volume(const AnnotationSet& pred, const AnnotationSet& gt, double cutoff, bool paired,
                         std::string name) {
  VolumeScore s;
  s.name = std::move(name);
  s.pre = assign(pred.sites(PointKind::pre), gt.sites(PointKind::pre), cutoff);
  s.post = paired ? score_paired(pred, gt, cutoff)
                  : assign(pred.sites(PointKind::post), gt.sites(PointKind::post), cutoff);
  s.f1_pre = f1(s.pre);
  s.f1_post = f1(s.post);
  s.f1 = 0.5 * (s.f1_pre + s.f1_post);
  return s;
}

ScoreReport aggregate(std::span<const ClassF1> per_volume) {
  if (per_volume.empty()) throw Error(ErrorCode::invariant, "cannot aggregate an empty list of volumes");
  ScoreReport r;
  for (const auto& v : per_volume) {
    for (const double x : {v.f1_pre, v.f1_post}) {
      if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::range, "F1 values must lie in [0,1]");
    }
    const double f = 0.5 * (v.f1_pre + v.f1_post);
    r.volumes.push_back({v.name, v.f1_pre, v.f1_post, f});
    r.mean_f1_pre += v.f1_pre;
    r.mean_f1_post += v.f1_post;
    r.mean_f1 += f;
  }
  const auto n = static_cast<double>(per_volume.size());
  r.mean_f1_pre /= n;
  r.mean_f1_post /= n;
  r.mean_f1 /= n;
  return r;
}

ScoreReport aggregate(std::span<const VolumeScore> per_volume) {
  std::vector<ClassF1> rows;
  rows.reserve(per_volume.size());
  for (const auto& v : per_volume) rows.push_back({v.name, v.f1_pre, v.f1_post});
  return aggregate(rows);
}

}  // namespace synvol

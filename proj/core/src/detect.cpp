#include "synvol/detect.hpp"

#include <array>
#include <limits>

namespace synvol {

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::range, "threshold gamma must lie in (0,1), got " + std::to_string(gamma));
  }
}

Connectivity connectivity_from_int(int n) {
  if (n == 6) return Connectivity::six;
  if (n == 26) return Connectivity::twenty_six;
  throw Error(ErrorCode::range, "connectivity must be 6 or 26, got " + std::to_string(n));
}

MaskVolume threshold(const ProbVolume& prob, double gamma) {
  check_gamma(gamma);
  MaskVolume mask(prob.dims());
  const auto in = prob.values();
  auto out = mask.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = static_cast<double>(in[i]) >= gamma ? 1 : 0;
  return mask;
}

namespace {

class DisjointSets {
 public:
  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return parent_.back();
  }

  std::uint32_t find(std::uint32_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  // The smaller (earlier) root survives.
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }

  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::uint32_t> parent_;
};

struct Offset {
  std::int64_t dz, dy, dx;
};

// Neighbors already visited by a z-y-x raster scan.
constexpr std::array<Offset, 3> kBackward6{{{-1, 0, 0}, {0, -1, 0}, {0, 0, -1}}};
constexpr std::array<Offset, 13> kBackward26{{{-1, -1, -1},
                                              {-1, -1, 0},
                                              {-1, -1, 1},
                                              {-1, 0, -1},
                                              {-1, 0, 0},
                                              {-1, 0, 1},
                                              {-1, 1, -1},
                                              {-1, 1, 0},
                                              {-1, 1, 1},
                                              {0, -1, -1},
                                              {0, -1, 0},
                                              {0, -1, 1},
                                              {0, 0, -1}}};

template <std::size_t N>
Components label_with(const MaskVolume& mask, const std::array<Offset, N>& neighbors) {
  const Dims dims = mask.dims();
  Components out{LabelVolume(dims), 0};
  auto labels = out.labels.values();
  const auto fg = mask.values();

  // Provisional labels start at 1; slot 0 is a placeholder for background.
  DisjointSets sets;
  sets.make();

  std::array<std::ptrdiff_t, N> delta{};
  for (std::size_t k = 0; k < N; ++k) {
    delta[k] = static_cast<std::ptrdiff_t>((neighbors[k].dz * dims.h + neighbors[k].dy) * dims.w + neighbors[k].dx);
  }

  std::size_t i = 0;
  for (std::int64_t z = 0; z < dims.d; ++z) {
    for (std::int64_t y = 0; y < dims.h; ++y) {
      for (std::int64_t x = 0; x < dims.w; ++x, ++i) {
        if (!fg[i]) continue;
        std::uint32_t current = 0;
        for (std::size_t k = 0; k < N; ++k) {
          const auto& o = neighbors[k];
          const std::int64_t nz = z + o.dz, ny = y + o.dy, nx = x + o.dx;
          if (nz < 0 || ny < 0 || nx < 0 || ny >= dims.h || nx >= dims.w) continue;
          const std::uint32_t l = labels[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + delta[k])];
          if (l == 0) continue;
          if (current == 0) {
            current = l;
          } else if (l != current) {
            sets.unite(current, l);
          }
        }
        if (current == 0) {
          if (sets.size() > std::numeric_limits<std::uint32_t>::max() - 1) {
            throw Error(ErrorCode::range, "too many provisional components");
          }
          current = sets.make();
        }
        labels[i] = current;
      }
    }
  }

  // First-seen order over the raster scan makes the numbering canonical.
  std::vector<std::uint32_t> final_id(sets.size(), 0);
  std::uint32_t next = 0;
  for (auto& l : labels) {
    if (l == 0) continue;
    const std::uint32_t root = sets.find(l);
    if (final_id[root] == 0) final_id[root] = ++next;
    l = final_id[root];
  }
  out.count = next;
  return out;
}

// floor(sum / count + 1/2) for non-negative sums, in exact integer arithmetic.
std::int64_t round_half_up(std::int64_t sum, std::int64_t count) { return (2 * sum + count) / (2 * count); }

}  // namespace

Components label_components(const MaskVolume& mask, Connectivity connectivity) {
  if (connectivity == Connectivity::six) return label_with(mask, kBackward6);
  return label_with(mask, kBackward26);
}

std::vector<Detection> centroids(const LabelVolume& labels, std::uint64_t min_size) {
  struct Accum {
    std::int64_t z = 0, y = 0, x = 0;
    std::uint64_t count = 0;
  };
  std::vector<Accum> acc;
  const Dims dims = labels.dims();
  const auto values = labels.values();
  std::size_t i = 0;
  for (std::int64_t z = 0; z < dims.d; ++z) {
    for (std::int64_t y = 0; y < dims.h; ++y) {
      for (std::int64_t x = 0; x < dims.w; ++x, ++i) {
        const std::uint32_t l = values[i];
        if (l == 0) continue;
        if (l >= acc.size()) acc.resize(static_cast<std::size_t>(l) + 1);
        auto& a = acc[l];
        a.z += z;
        a.y += y;
        a.x += x;
        ++a.count;
      }
    }
  }
  std::vector<Detection> out;
  for (std::size_t l = 1; l < acc.size(); ++l) {
    const auto& a = acc[l];
    if (a.count == 0 || a.count < min_size) continue;
    const auto n = static_cast<std::int64_t>(a.count);
    out.push_back({static_cast<std::uint32_t>(l),
                   {round_half_up(a.z, n), round_half_up(a.y, n), round_half_up(a.x, n)},
                   a.count});
  }
  return out;
}

std::vector<Detection> detect_mask(const MaskVolume& mask, Connectivity connectivity, std::uint64_t min_size) {
  return centroids(label_components(mask, connectivity).labels, min_size);
}

std::vector<Detection> detect(const ProbVolume& prob, const DetectParams& params) {
  return detect_mask(threshold(prob, params.gamma), params.connectivity, params.min_size);
}

AnnotationSet to_annotations(const std::vector<Detection>& detections, PointKind kind, Dims dims) {
  std::vector<PointAnnotation> points;
  points.reserve(detections.size());
  for (const auto& d : detections) points.push_back({d.component_id, kind, d.centroid, std::nullopt, d.voxel_count});
  return AnnotationSet(std::move(points), dims);
}

}  // namespace synvol

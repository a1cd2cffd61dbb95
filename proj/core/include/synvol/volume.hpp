#pragma once

// Dense 3D voxel grids. Storage is always z-y-x row-major: x varies fastest.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "synvol/error.hpp"

namespace synvol {

/// Integer voxel coordinate.
struct Coord {
  std::int64_t z = 0;
  std::int64_t y = 0;
  std::int64_t x = 0;

  friend constexpr auto operator<=>(const Coord&, const Coord&) = default;

  friend constexpr Coord operator+(Coord a, Coord b) { return {a.z + b.z, a.y + b.y, a.x + b.x}; }
  friend constexpr Coord operator-(Coord a, Coord b) { return {a.z - b.z, a.y - b.y, a.x - b.x}; }
};

std::string to_string(const Coord& c);

constexpr std::int64_t squared_distance(Coord a, Coord b) {
  const Coord d = a - b;
  return d.z * d.z + d.y * d.y + d.x * d.x;
}

constexpr std::int64_t chebyshev_distance(Coord a, Coord b) {
  const Coord d = a - b;
  auto abs = [](std::int64_t v) { return v < 0 ? -v : v; };
  return std::max({abs(d.z), abs(d.y), abs(d.x)});
}

double euclidean_distance(Coord a, Coord b);

/// Volume extent (depth, height, width).
struct Dims {
  std::int64_t d = 0;
  std::int64_t h = 0;
  std::int64_t w = 0;

  friend constexpr bool operator==(const Dims&, const Dims&) = default;

  constexpr std::size_t voxels() const { return static_cast<std::size_t>(d * h * w); }
  constexpr bool positive() const { return d > 0 && h > 0 && w > 0; }

  constexpr bool contains(Coord c) const {
    return c.z >= 0 && c.y >= 0 && c.x >= 0 && c.z < d && c.y < h && c.x < w;
  }

  constexpr std::size_t index(Coord c) const {
    return static_cast<std::size_t>((c.z * h + c.y) * w + c.x);
  }

  constexpr Coord coord(std::size_t i) const {
    const auto idx = static_cast<std::int64_t>(i);
    return {idx / (h * w), (idx / w) % h, idx % w};
  }
};

std::string to_string(const Dims& d);

/// Throws Error(range) unless every extent is positive.
void require_positive(const Dims& d, std::string_view what);

enum class ElementKind { prob, mask, labels };

std::string_view to_string(ElementKind kind) noexcept;
ElementKind element_kind_from_string(std::string_view s);

template <typename T>
class Volume {
 public:
  using value_type = T;

  Volume() = default;

  explicit Volume(Dims dims, T fill = T{}) : dims_(dims), data_(checked_size(dims), fill) {}

  Volume(Dims dims, std::vector<T> data) : dims_(dims), data_(std::move(data)) {
    if (data_.size() != checked_size(dims)) {
      throw Error(ErrorCode::invariant,
                  "volume data length " + std::to_string(data_.size()) + " does not match dims " +
                      to_string(dims));
    }
  }

  const Dims& dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }

  std::span<const T> values() const { return data_; }
  std::span<T> values() { return data_; }

  const T& operator[](std::size_t i) const { return data_[i]; }
  T& operator[](std::size_t i) { return data_[i]; }

  const T& at(Coord c) const { return data_[dims_.index(c)]; }
  T& at(Coord c) { return data_[dims_.index(c)]; }

  friend bool operator==(const Volume&, const Volume&) = default;

 private:
  static std::size_t checked_size(const Dims& dims) {
    require_positive(dims, "volume dims");
    return dims.voxels();
  }

  Dims dims_{};
  std::vector<T> data_;
};

using ProbVolume = Volume<float>;
using MaskVolume = Volume<std::uint8_t>;
using LabelVolume = Volume<std::uint32_t>;

template <typename T>
constexpr ElementKind element_kind_of() {
  if constexpr (std::is_same_v<T, float>) {
    return ElementKind::prob;
  } else if constexpr (std::is_same_v<T, std::uint8_t>) {
    return ElementKind::mask;
  } else {
    static_assert(std::is_same_v<T, std::uint32_t>, "no element kind for this type");
    return ElementKind::labels;
  }
}

/// Checks element-kind value invariants: prob in [0,1] without NaN, mask in {0,1}.
/// Label volumes are always valid. Throws Error(invariant) on the first bad voxel.
void validate(const ProbVolume& v);
void validate(const MaskVolume& v);
inline void validate(const LabelVolume&) {}

/// Count of nonzero voxels.
template <typename T>
std::size_t count_nonzero(const Volume<T>& v) {
  return static_cast<std::size_t>(
      std::count_if(v.values().begin(), v.values().end(), [](T x) { return x != T{}; }));
}

MaskVolume binarize(const LabelVolume& labels);
ProbVolume to_prob(const MaskVolume& mask);

}  // namespace synvol

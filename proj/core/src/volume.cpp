#include "synvol/volume.hpp"

#include <cmath>

namespace synvol {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::io: return "io_error";
    case ErrorCode::format: return "format_error";
    case ErrorCode::range: return "range_error";
    case ErrorCode::invariant: return "invariant_error";
    case ErrorCode::plan: return "plan_error";
    case ErrorCode::placement: return "placement_error";
  }
  return "error";
}

std::string to_string(const Coord& c) {
  return "(" + std::to_string(c.z) + "," + std::to_string(c.y) + "," + std::to_string(c.x) + ")";
}

double euclidean_distance(Coord a, Coord b) {
  return std::sqrt(static_cast<double>(squared_distance(a, b)));
}

std::string to_string(const Dims& d) {
  return "(" + std::to_string(d.d) + "," + std::to_string(d.h) + "," + std::to_string(d.w) + ")";
}

void require_positive(const Dims& d, std::string_view what) {
  if (!d.positive()) {
    throw Error(ErrorCode::range, std::string(what) + " must be positive, got " + to_string(d));
  }
}

std::string_view to_string(ElementKind kind) noexcept {
  switch (kind) {
    case ElementKind::prob: return "prob";
    case ElementKind::mask: return "mask";
    case ElementKind::labels: return "labels";
  }
  return "?";
}

ElementKind element_kind_from_string(std::string_view s) {
  if (s == "prob") return ElementKind::prob;
  if (s == "mask") return ElementKind::mask;
  if (s == "labels") return ElementKind::labels;
  throw Error(ErrorCode::format, "unknown element kind '" + std::string(s) + "'");
}

void validate(const ProbVolume& v) {
  const auto values = v.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float p = values[i];
    // NaN fails both comparisons
    if (!(p >= 0.0f && p <= 1.0f)) {
      throw Error(ErrorCode::invariant, "prob voxel " + to_string(v.dims().coord(i)) +
                                            " outside [0,1]: " + std::to_string(p));
    }
  }
}

void validate(const MaskVolume& v) {
  const auto values = v.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > 1) {
      throw Error(ErrorCode::invariant, "mask voxel " + to_string(v.dims().coord(i)) +
                                            " not binary: " + std::to_string(values[i]));
    }
  }
}

MaskVolume binarize(const LabelVolume& labels) {
  MaskVolume out(labels.dims());
  const auto in = labels.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < in.size(); ++i) dst[i] = in[i] != 0 ? 1 : 0;
  return out;
}

ProbVolume to_prob(const MaskVolume& mask) {
  ProbVolume out(mask.dims());
  const auto in = mask.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < in.size(); ++i) dst[i] = in[i] != 0 ? 1.0f : 0.0f;
  return out;
}

}  // namespace synvol

#pragma once

// On-disk formats.
//
// Volume: `<name>.json` header
//   {"dims":[D,H,W],"kind":"prob|mask|labels","order":"zyx","endian":"little"}
// next to a `<name>.raw` payload of D*H*W little-endian elements
// (f32 for prob, u8 for mask, u32 for labels). Any extension on the path
// passed in is replaced, so `scene/p.vol`, `scene/p.json` and `scene/p`
// all name the pair scene/p.json + scene/p.raw.
//
// Annotations: JSON array of
//   {"id":int,"kind":"pre|post","pos":[z,y,x],"partner_id":int|null}
// with an optional "voxel_count" on detector output.

#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include "synvol/annotation.hpp"
#include "synvol/volume.hpp"

namespace synvol {

using AnyVolume = std::variant<ProbVolume, MaskVolume, LabelVolume>;

struct VolumePaths {
  std::filesystem::path header;
  std::filesystem::path payload;
};

VolumePaths volume_paths(const std::filesystem::path& path);

struct VolumeHeader {
  Dims dims;
  ElementKind kind = ElementKind::prob;
};

VolumeHeader read_volume_header(const std::filesystem::path& path);

AnyVolume load_volume(const std::filesystem::path& path);
ProbVolume load_prob(const std::filesystem::path& path);
MaskVolume load_mask(const std::filesystem::path& path);
LabelVolume load_labels(const std::filesystem::path& path);

void save_volume(const ProbVolume& v, const std::filesystem::path& path);
void save_volume(const MaskVolume& v, const std::filesystem::path& path);
void save_volume(const LabelVolume& v, const std::filesystem::path& path);

AnnotationSet load_points(const std::filesystem::path& path, std::optional<Dims> dims = std::nullopt);
void save_points(const AnnotationSet& set, const std::filesystem::path& path);

/// JSON text of an annotation set, exactly as save_points writes it.
std::string points_to_json(const AnnotationSet& set);
AnnotationSet points_from_json(const std::string& text, std::optional<Dims> dims = std::nullopt);

}  // namespace synvol

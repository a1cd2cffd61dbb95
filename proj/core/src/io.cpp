#include "synvol/io.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

namespace synvol {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

template <typename T>
constexpr std::size_t element_bytes = sizeof(T);

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

// Explicit little-endian packing so the payload does not depend on host order.
template <typename T>
std::string encode_payload(std::span<const T> values) {
  std::string bytes(values.size() * element_bytes<T>, '\0');
  auto* dst = reinterpret_cast<unsigned char*>(bytes.data());
  for (const T v : values) {
    std::uint32_t bits = 0;
    if constexpr (std::is_same_v<T, float>) {
      std::memcpy(&bits, &v, sizeof(float));
    } else {
      bits = static_cast<std::uint32_t>(v);
    }
    for (std::size_t b = 0; b < element_bytes<T>; ++b) *dst++ = static_cast<unsigned char>(bits >> (8 * b));
  }
  return bytes;
}

template <typename T>
std::vector<T> decode_payload(const std::string& bytes, std::size_t count) {
  std::vector<T> values(count);
  const auto* src = reinterpret_cast<const unsigned char*>(bytes.data());
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t bits = 0;
    for (std::size_t b = 0; b < element_bytes<T>; ++b) bits |= static_cast<std::uint32_t>(*src++) << (8 * b);
    if constexpr (std::is_same_v<T, float>) {
      std::memcpy(&values[i], &bits, sizeof(float));
    } else {
      values[i] = static_cast<T>(bits);
    }
  }
  return values;
}

template <typename T>
void save_any(const Volume<T>& v, const fs::path& path) {
  validate(v);
  const auto paths = volume_paths(path);
  ordered_json header;
  header["dims"] = {v.dims().d, v.dims().h, v.dims().w};
  header["kind"] = std::string(to_string(element_kind_of<T>()));
  header["order"] = "zyx";
  header["endian"] = "little";
  write_file(paths.header, header.dump() + "\n");
  write_file(paths.payload, encode_payload<T>(v.values()));
}

template <typename T>
Volume<T> load_typed(const fs::path& path) {
  const auto header = read_volume_header(path);
  if (header.kind != element_kind_of<T>()) {
    throw Error(ErrorCode::format, path.string() + ": expected " + std::string(to_string(element_kind_of<T>())) +
                                       " volume, found " + std::string(to_string(header.kind)));
  }
  const auto paths = volume_paths(path);
  const std::string bytes = read_file(paths.payload);
  const std::size_t count = header.dims.voxels();
  if (bytes.size() != count * sizeof(T)) {
    throw Error(ErrorCode::format, paths.payload.string() + ": payload has " + std::to_string(bytes.size()) +
                                       " bytes, header " + to_string(header.dims) + " requires " +
                                       std::to_string(count * sizeof(T)));
  }
  Volume<T> v(header.dims, decode_payload<T>(bytes, count));
  try {
    validate(v);
  } catch (const Error& e) {
    throw Error(ErrorCode::format, paths.payload.string() + ": " + e.what());
  }
  return v;
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::format, origin + ": " + e.what());
  }
}

}  // namespace

VolumePaths volume_paths(const fs::path& path) {
  fs::path stem = path;
  if (stem.has_extension()) stem.replace_extension();
  return {fs::path(stem).concat(".json"), fs::path(stem).concat(".raw")};
}

VolumeHeader read_volume_header(const fs::path& path) {
  const auto paths = volume_paths(path);
  const json header = parse_json(read_file(paths.header), paths.header.string());
  const auto where = paths.header.string() + ": ";
  try {
    if (!header.is_object()) throw Error(ErrorCode::format, where + "header must be an object");
    const auto& dims = header.at("dims");
    if (!dims.is_array() || dims.size() != 3) throw Error(ErrorCode::format, where + "dims must be [D,H,W]");
    std::array<std::int64_t, 3> extent{};
    for (std::size_t i = 0; i < 3; ++i) {
      if (!dims[i].is_number_integer() || dims[i].get<std::int64_t>() <= 0) {
        throw Error(ErrorCode::format, where + "dims must be positive integers");
      }
      extent[i] = dims[i].get<std::int64_t>();
    }
    if (header.at("order").get<std::string>() != "zyx") {
      throw Error(ErrorCode::format, where + "only zyx order is supported");
    }
    if (header.at("endian").get<std::string>() != "little") {
      throw Error(ErrorCode::format, where + "only little endian payloads are supported");
    }
    return {{extent[0], extent[1], extent[2]}, element_kind_from_string(header.at("kind").get<std::string>())};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, where + e.what());
  }
}

AnyVolume load_volume(const fs::path& path) {
  switch (read_volume_header(path).kind) {
    case ElementKind::prob: return load_typed<float>(path);
    case ElementKind::mask: return load_typed<std::uint8_t>(path);
    case ElementKind::labels: return load_typed<std::uint32_t>(path);
  }
  throw Error(ErrorCode::format, "unreachable element kind");
}

ProbVolume load_prob(const fs::path& path) { return load_typed<float>(path); }
MaskVolume load_mask(const fs::path& path) { return load_typed<std::uint8_t>(path); }
LabelVolume load_labels(const fs::path& path) { return load_typed<std::uint32_t>(path); }

void save_volume(const ProbVolume& v, const fs::path& path) { save_any(v, path); }
void save_volume(const MaskVolume& v, const fs::path& path) { save_any(v, path); }
void save_volume(const LabelVolume& v, const fs::path& path) { save_any(v, path); }

std::string points_to_json(const AnnotationSet& set) {
  // One point per line keeps large sets diffable.
  std::string text = "[";
  for (const auto& p : set.points()) {
    ordered_json item;
    item["id"] = p.id;
    item["kind"] = std::string(to_string(p.kind));
    item["pos"] = {p.pos.z, p.pos.y, p.pos.x};
    item["partner_id"] = p.partner_id ? ordered_json(*p.partner_id) : ordered_json(nullptr);
    if (p.voxel_count) item["voxel_count"] = *p.voxel_count;
    text += (text.size() == 1 ? "\n " : ",\n ") + item.dump();
  }
  return text + "\n]\n";
}

AnnotationSet points_from_json(const std::string& text, std::optional<Dims> dims) {
  const json doc = parse_json(text, "annotations");
  if (!doc.is_array()) throw Error(ErrorCode::format, "annotation file must be a JSON array");
  std::vector<PointAnnotation> points;
  points.reserve(doc.size());
  try {
    for (const auto& item : doc) {
      PointAnnotation p;
      const auto& id = item.at("id");
      if (!id.is_number_unsigned()) throw Error(ErrorCode::format, "point id must be a non-negative integer");
      p.id = id.get<PointId>();
      p.kind = point_kind_from_string(item.at("kind").get<std::string>());
      const auto& pos = item.at("pos");
      if (!pos.is_array() || pos.size() != 3 || !pos[0].is_number_integer() || !pos[1].is_number_integer() ||
          !pos[2].is_number_integer()) {
        throw Error(ErrorCode::format, "point " + std::to_string(p.id) + ": pos must be [z,y,x] integers");
      }
      p.pos = {pos[0].get<std::int64_t>(), pos[1].get<std::int64_t>(), pos[2].get<std::int64_t>()};
      if (const auto it = item.find("partner_id"); it != item.end() && !it->is_null()) {
        if (!it->is_number_unsigned()) throw Error(ErrorCode::format, "partner_id must be a non-negative integer");
        p.partner_id = it->get<PointId>();
      }
      if (const auto it = item.find("voxel_count"); it != item.end() && !it->is_null()) {
        p.voxel_count = it->get<std::uint64_t>();
      }
      points.push_back(p);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::format, std::string("annotation file: ") + e.what());
  }
  return AnnotationSet(std::move(points), dims);
}

AnnotationSet load_points(const fs::path& path, std::optional<Dims> dims) {
  try {
    return points_from_json(read_file(path), dims);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::io) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void save_points(const AnnotationSet& set, const fs::path& path) { write_file(path, points_to_json(set)); }

}  // namespace synvol

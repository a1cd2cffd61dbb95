#include "synvol/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <vector>

namespace synvol {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw Error(ErrorCode::format, "invalid value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

}  // namespace

Dims parse_dims(std::string_view text) {
  std::vector<std::int64_t> parts;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    parts.push_back(parse_number<std::int64_t>("dims", trim(text.substr(start, comma - start))));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (parts.size() != 3) throw Error(ErrorCode::format, "dims must be D,H,W, got '" + std::string(text) + "'");
  const Dims d{parts[0], parts[1], parts[2]};
  require_positive(d, "dims");
  return d;
}

void validate(const PipelineConfig& c) {
  if (c.radius < 0) throw Error(ErrorCode::range, "radius must be >= 0");
  check_gamma(c.gamma_pre);
  check_gamma(c.gamma_post);
  connectivity_from_int(c.connectivity);
  if (c.min_size < 1) throw Error(ErrorCode::range, "min_size must be >= 1");
  if (!(c.cutoff > 0.0)) throw Error(ErrorCode::range, "cutoff must be > 0");
  require_positive(c.patch, "patch dims");
  if (c.fg_weight && !(*c.fg_weight > 0.0)) throw Error(ErrorCode::range, "fg_weight must be > 0");
  if (c.jobs < 1) throw Error(ErrorCode::range, "jobs must be >= 1");
}

void apply_setting(PipelineConfig& c, std::string_view key, std::string_view value) {
  if (key == "radius") {
    c.radius = parse_number<int>(key, value);
  } else if (key == "gamma_pre") {
    c.gamma_pre = parse_number<double>(key, value);
  } else if (key == "gamma_post") {
    c.gamma_post = parse_number<double>(key, value);
  } else if (key == "connectivity") {
    c.connectivity = parse_number<int>(key, value);
  } else if (key == "min_size") {
    c.min_size = parse_number<std::uint64_t>(key, value);
  } else if (key == "cutoff") {
    c.cutoff = parse_number<double>(key, value);
  } else if (key == "patch") {
    c.patch = parse_dims(value);
  } else if (key == "fg_weight") {
    if (value == "auto") {
      c.fg_weight.reset();
    } else {
      c.fg_weight = parse_number<double>(key, value);
    }
  } else if (key == "jobs") {
    c.jobs = parse_number<unsigned>(key, value);
  } else {
    throw Error(ErrorCode::format, "unknown config key '" + std::string(key) + "'");
  }
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::format, path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = trim(s.substr(0, eq));
    auto value = trim(s.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    try {
      apply_setting(base, key, value);
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

unsigned default_jobs() {
  if (const char* env = std::getenv("SYNVOL_JOBS")) {
    unsigned n = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec == std::errc{} && ptr == s.data() + s.size() && n > 0) return n;
  }
  return 1;
}

}  // namespace synvol

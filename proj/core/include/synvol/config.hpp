#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "synvol/detect.hpp"
#include "synvol/raster.hpp"
#include "synvol/score.hpp"
#include "synvol/volume.hpp"

namespace synvol {

struct PipelineConfig {
  int radius = kDefaultRadius;
  double gamma_pre = 0.75;
  double gamma_post = 0.65;
  int connectivity = 26;
  std::uint64_t min_size = 1;
  double cutoff = kDefaultCutoff;
  Dims patch{128, 128, 128};
  std::optional<double> fg_weight;  // nullopt = auto
  unsigned jobs = 1;

  Thresholds thresholds() const { return {gamma_pre, gamma_post}; }
};

/// Throws Error(range) for any out-of-range field.
void validate(const PipelineConfig& config);

/// Applies one `key = value` setting. Keys: radius, gamma_pre, gamma_post,
/// connectivity, min_size, cutoff, patch ("D,H,W"), fg_weight ("auto" or a
/// number), jobs.
void apply_setting(PipelineConfig& config, std::string_view key, std::string_view value);

/// Reads a flat key/value file: one `key = value` per line, `#` comments,
/// optional double quotes around values. Settings are applied over `base`.
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

Dims parse_dims(std::string_view text);

/// Jobs default: SYNVOL_JOBS when set to a positive integer, else 1.
unsigned default_jobs();

}  // namespace synvol

#pragma once

// JSON documents written by the command-line tools. Every report embeds the
// effective configuration under "config".
//
// Score report:
//   {"config":{...}, "paired":bool, "cutoff":real,
//    "volumes":[{"name", "f1_pre", "f1_post", "f1",
//                "pre":{"tp","fp","fn"}, "post":{"tp","fp","fn"}}],
//    "mean":{"f1_pre", "f1_post", "f1"}}
// Aggregate-only reports (from per-volume F1 tables) omit the counts.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "synvol/config.hpp"
#include "synvol/pair.hpp"
#include "synvol/pipeline.hpp"
#include "synvol/score.hpp"

namespace synvol {

std::string config_json(const PipelineConfig& config);

std::string score_report_json(std::span<const VolumeScore> volumes, const ScoreReport& report,
                              const PipelineConfig& config, bool paired);

std::string aggregate_report_json(const ScoreReport& report, const PipelineConfig& config);

std::string e2e_report_json(const E2EResult& result, const E2ESpec& spec, const PipelineConfig& config);

/// {"pairs":[{"post_id","pre_id","distance"}]}
std::string pairing_json(const Pairing& pairing);

/// Per-volume F1 table: JSON array of {"name"?, "f1_pre", "f1_post"}.
std::vector<ClassF1> load_f1_table(const std::filesystem::path& path);

}  // namespace synvol

#include "synvol/report.hpp"

#include <fstream>
#include <iterator>

#include <json.hpp>

namespace synvol {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json config_object(const PipelineConfig& c) {
  ordered_json j;
  j["radius"] = c.radius;
  j["gamma_pre"] = c.gamma_pre;
  j["gamma_post"] = c.gamma_post;
  j["connectivity"] = c.connectivity;
  j["min_size"] = c.min_size;
  j["cutoff"] = c.cutoff;
  j["patch"] = {c.patch.d, c.patch.h, c.patch.w};
  j["fg_weight"] = c.fg_weight ? ordered_json(*c.fg_weight) : ordered_json("auto");
  j["jobs"] = c.jobs;
  return j;
}

ordered_json counts(const MatchResult& r) {
  ordered_json j;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  return j;
}

ordered_json volume_object(const VolumeScore& v) {
  ordered_json j;
  j["name"] = v.name;
  j["f1_pre"] = v.f1_pre;
  j["f1_post"] = v.f1_post;
  j["f1"] = v.f1;
  j["pre"] = counts(v.pre);
  j["post"] = counts(v.post);
  return j;
}

ordered_json mean_object(const ScoreReport& r) {
  ordered_json j;
  j["f1_pre"] = r.mean_f1_pre;
  j["f1_post"] = r.mean_f1_post;
  j["f1"] = r.mean_f1;
  return j;
}

}  // namespace

std::string config_json(const PipelineConfig& config) { return config_object(config).dump(); }

std::string score_report_json(std::span<const VolumeScore> volumes, const ScoreReport& report,
                              const PipelineConfig& config, bool paired) {
  ordered_json j;
  j["config"] = config_object(config);
  j["paired"] = paired;
  j["cutoff"] = config.cutoff;
  j["volumes"] = ordered_json::array();
  for (const auto& v : volumes) j["volumes"].push_back(volume_object(v));
  j["mean"] = mean_object(report);
  return j.dump(2) + "\n";
}

std::string aggregate_report_json(const ScoreReport& report, const PipelineConfig& config) {
  ordered_json j;
  j["config"] = config_object(config);
  j["volumes"] = ordered_json::array();
  for (const auto& v : report.volumes) {
    ordered_json row;
    row["name"] = v.name;
    row["f1_pre"] = v.f1_pre;
    row["f1_post"] = v.f1_post;
    row["f1"] = v.f1;
    j["volumes"].push_back(std::move(row));
  }
  j["mean"] = mean_object(report);
  return j.dump(2) + "\n";
}

std::string e2e_report_json(const E2EResult& result, const E2ESpec& spec, const PipelineConfig& config) {
  ordered_json j;
  j["config"] = config_object(config);
  ordered_json scene;
  scene["dims"] = {spec.scene.dims.d, spec.scene.dims.h, spec.scene.dims.w};
  scene["pairs"] = spec.scene.n_pairs;
  scene["seed"] = spec.scene.seed;
  scene["min_spacing"] = spec.scene.min_spacing;
  scene["source_sigma"] = spec.source_sigma;
  scene["source_noise"] = spec.source_noise;
  scene["target_sigma"] = spec.target_sigma;
  scene["target_noise"] = spec.target_noise;
  j["scene"] = std::move(scene);
  j["paired"] = true;
  j["source"] = volume_object(result.source.score);
  j["stage1"] = volume_object(result.stage1.score);
  j["stage2"] = volume_object(result.stage2.score);
  return j.dump(2) + "\n";
}

std::string pairing_json(const Pairing& pairing) {
  ordered_json j;
  j["pairs"] = ordered_json::array();
  for (const auto& a : pairing.assignments) {
    ordered_json row;
    row["post_id"] = a.post_id;
    row["pre_id"] = a.pre_id;
    row["distance"] = a.distance;
    j["pairs"].push_back(std::move(row));
  }
  return j.dump(1) + "\n";
}

std::vector<ClassF1> load_f1_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<ClassF1> rows;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (!doc.is_array()) throw Error(ErrorCode::format, path.string() + ": F1 table must be a JSON array");
    for (const auto& item : doc) {
      ClassF1 row;
      row.name = item.value("name", "volume " + std::to_string(rows.size() + 1));
      row.f1_pre = item.at("f1_pre").get<double>();
      row.f1_post = item.at("f1_post").get<double>();
      rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::format, path.string() + ": " + e.what());
  }
  return rows;
}

}  // namespace synvol

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "synvol/config.hpp"
#include "synvol/detect.hpp"
#include "synvol/io.hpp"
#include "synvol/loss.hpp"
#include "synvol/pair.hpp"
#include "synvol/parallel.hpp"
#include "synvol/pipeline.hpp"
#include "synvol/pseudo.hpp"
#include "synvol/raster.hpp"
#include "synvol/report.hpp"
#include "synvol/score.hpp"
#include "synvol/synth.hpp"
#include "synvol/tile.hpp"

namespace synvol::cli {

namespace fs = std::filesystem;

namespace {

// A pipeline setting exposed as a flag. Explicit flags override the config file.
struct Setting {
  std::string key;
  std::string value;
  CLI::Option* option = nullptr;
};

class Settings {
 public:
  explicit Settings(CLI::App* app) : app_(app) {
    app->add_option("--config", config_path_, "Flat key = value config file");
    add("--jobs", "jobs", "Worker threads (default: SYNVOL_JOBS or 1)");
  }

  Settings& add(const std::string& flag, const std::string& key, const std::string& help) {
    auto& s = settings_[key];
    s.key = key;
    s.option = app_->add_option(flag, s.value, help);
    return *this;
  }

  bool given(const std::string& key) const {
    const auto it = settings_.find(key);
    return it != settings_.end() && it->second.option->count() > 0;
  }

  const std::string& value(const std::string& key) const { return settings_.at(key).value; }

  /// Defaults <- config file <- explicit flags; `rename` redirects a flag to another key.
  PipelineConfig resolve(const std::map<std::string, std::string>& rename = {}) const {
    PipelineConfig config;
    config.jobs = default_jobs();
    if (!config_path_.empty()) config = load_config(config_path_, config);
    for (const auto& [key, s] : settings_) {
      if (s.option->count() == 0) continue;
      const auto it = rename.find(key);
      apply_setting(config, it == rename.end() ? key : it->second, s.value);
    }
    validate(config);
    return config;
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::map<std::string, Setting> settings_;
};

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void write_text(const fs::path& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

std::vector<fs::path> json_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

bool is_annotation_file(const fs::path& path) {
  std::ifstream in(path);
  char c = 0;
  while (in.get(c) && std::isspace(static_cast<unsigned char>(c))) {
  }
  return c == '[';
}

// --- subcommands -----------------------------------------------------------

struct RasterizeArgs {
  std::string points, dims, kind = "pre", out;
  bool instances = false;
};

struct BlendArgs {
  std::string plan_from, inputs, out;
};

struct SplitArgs {
  std::string prob, out_dir;
};

struct DetectArgs {
  std::string prob, kind = "pre", out;
};

struct MatchArgs {
  std::string pre, post, out, pairs_out;
};

struct PseudoArgs {
  std::string prob_pre, prob_post, out_dir, mode = "squares";
};

struct ScoreArgs {
  std::string pred, gt, report, from_f1;
  bool paired = false;
};

struct LossArgs {
  std::string pred, target;
};

struct SceneArgs {
  std::string dims = "64,64,64", out_dir, report;
  int pairs = 10;
  std::uint64_t seed = 0;
  double sigma = 1.5, noise = 0.0;
  std::optional<double> target_sigma, target_noise;
  std::int64_t min_spacing = 15, margin = 8;
  double offset_min = 3.0, offset_max = 6.0;
};

void add_scene_options(CLI::App* sub, SceneArgs& a) {
  sub->add_option("--dims", a.dims, "Volume dims D,H,W")->capture_default_str();
  sub->add_option("--pairs", a.pairs, "Number of pre/post pairs")->capture_default_str();
  sub->add_option("--seed", a.seed, "Scene seed")->capture_default_str();
  sub->add_option("--sigma", a.sigma, "Gaussian sigma in voxels")->capture_default_str();
  sub->add_option("--noise", a.noise, "Uniform noise amplitude in [0, 0.5)")->capture_default_str();
  sub->add_option("--min-spacing", a.min_spacing, "Same-kind Chebyshev spacing")->capture_default_str();
  sub->add_option("--offset-min", a.offset_min, "Min pre-post distance")->capture_default_str();
  sub->add_option("--offset-max", a.offset_max, "Max pre-post distance")->capture_default_str();
  sub->add_option("--margin", a.margin, "Border margin in voxels")->capture_default_str();
}

SceneSpec scene_spec(const SceneArgs& a) {
  SceneSpec s;
  s.dims = parse_dims(a.dims);
  s.n_pairs = a.pairs;
  s.min_spacing = a.min_spacing;
  s.pair_offset_min = a.offset_min;
  s.pair_offset_max = a.offset_max;
  s.margin = a.margin;
  s.seed = a.seed;
  return s;
}

void check_render_params(double sigma, double noise) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::range, "sigma must be > 0");
  if (!(noise >= 0.0 && noise < 0.5)) throw Error(ErrorCode::range, "noise amplitude must lie in [0, 0.5)");
}

int cmd_rasterize(const RasterizeArgs& a, const Settings& settings, std::ostream&) {
  const auto config = settings.resolve();
  const Dims dims = parse_dims(a.dims);
  const PointKind kind = point_kind_from_string(a.kind);
  const auto points = load_points(a.points, dims);
  if (a.instances) {
    save_volume(rasterize_instances(to_sites(points.of_kind(kind)), dims, config.radius), a.out);
  } else {
    save_volume(rasterize_squares(points, kind, dims, config.radius), a.out);
  }
  return 0;
}

std::map<Coord, fs::path> patch_files(const fs::path& dir) {
  static const std::regex name(R"(patch_(\d+)_(\d+)_(\d+)\.json)");
  std::map<Coord, fs::path> found;
  for (const auto& file : json_files(dir)) {
    std::smatch m;
    const std::string base = file.filename().string();
    if (!std::regex_match(base, m, name)) continue;
    found[{std::stoll(m[1]), std::stoll(m[2]), std::stoll(m[3])}] = file;
  }
  return found;
}

int cmd_blend(const BlendArgs& a, const Settings& settings, std::ostream& out) {
  const auto config = settings.resolve();
  const Dims volume = parse_dims(a.plan_from);
  const PatchPlan plan = plan_patches(volume, config.patch);
  const auto files = patch_files(a.inputs);
  for (const auto& [offset, file] : files) {
    if (std::find(plan.offsets.begin(), plan.offsets.end(), offset) == plan.offsets.end()) {
      throw Error(ErrorCode::plan, file.string() + ": offset " + to_string(offset) + " is not part of the plan");
    }
  }
  Blender blender(volume, BumpWeights(plan.patch));
  for (const auto& [offset, file] : files) blender.add(offset, load_prob(file));
  save_volume(blender.finish(), a.out);
  out << "blended " << files.size() << " patches into " << to_string(volume) << "\n";
  return 0;
}

int cmd_split(const SplitArgs& a, const Settings& settings, std::ostream& out) {
  const auto config = settings.resolve();
  const ProbVolume prob = load_prob(a.prob);
  const PatchPlan plan = plan_patches(prob.dims(), config.patch);
  fs::create_directories(a.out_dir);
  for (const Coord o : plan.offsets) {
    const auto name = "patch_" + std::to_string(o.z) + "_" + std::to_string(o.y) + "_" + std::to_string(o.x) + ".vol";
    save_volume(crop(prob, o, plan.patch), fs::path(a.out_dir) / name);
  }
  out << "wrote " << plan.offsets.size() << " patches\n";
  return 0;
}

int cmd_detect(const DetectArgs& a, const Settings& settings, std::ostream& out) {
  const PointKind kind = point_kind_from_string(a.kind);
  const auto config = settings.resolve({{"gamma", kind == PointKind::pre ? "gamma_pre" : "gamma_post"}});
  const auto conn = connectivity_from_int(config.connectivity);
  const AnyVolume input = load_volume(a.prob);
  std::vector<Detection> detections;
  Dims dims;
  if (const auto* prob = std::get_if<ProbVolume>(&input)) {
    detections = detect(*prob, {config.thresholds().for_kind(kind), conn, config.min_size});
    dims = prob->dims();
  } else if (const auto* mask = std::get_if<MaskVolume>(&input)) {
    detections = detect_mask(*mask, conn, config.min_size);
    dims = mask->dims();
  } else {
    throw Error(ErrorCode::format, a.prob + ": detect expects a prob or mask volume");
  }
  ensure_parent(a.out);
  save_points(to_annotations(detections, kind, dims), a.out);
  out << detections.size() << " " << to_string(kind) << " detections\n";
  return 0;
}

int cmd_match(const MatchArgs& a, const Settings& settings, std::ostream& out) {
  settings.resolve();
  const AnnotationSet pres(load_points(a.pre).of_kind(PointKind::pre));
  const AnnotationSet posts(load_points(a.post).of_kind(PointKind::post));
  const Pairing pairing = match_nearest(posts.sites(PointKind::post), pres.sites(PointKind::pre));
  ensure_parent(a.out);
  save_points(combine_pairs(pres, posts, pairing), a.out);
  if (!a.pairs_out.empty()) write_text(a.pairs_out, pairing_json(pairing));
  out << pairing.assignments.size() << " posts paired to " << pres.size() << " pres\n";
  return 0;
}

int cmd_pseudo(const PseudoArgs& a, const Settings& settings, std::ostream& out) {
  const auto config = settings.resolve();
  if (a.mode != "squares" && a.mode != "segmentation") {
    throw Error(ErrorCode::range, "mode must be squares or segmentation");
  }
  const ProbVolume pre = load_prob(a.prob_pre);
  const ProbVolume post = load_prob(a.prob_post);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  if (a.mode == "segmentation") {
    const auto [mask_pre, mask_post] = pseudo_from_segmentation(pre, post, config.thresholds());
    save_volume(mask_pre, dir / "mask_pre.vol");
    save_volume(mask_post, dir / "mask_post.vol");
    out << "wrote thresholded masks\n";
    return 0;
  }
  const auto labels = generate_pseudo_labels(
      pre, post, {config.thresholds(), config.radius, connectivity_from_int(config.connectivity), config.min_size});
  save_volume(labels.mask_pre, dir / "mask_pre.vol");
  save_volume(labels.mask_post, dir / "mask_post.vol");
  save_points(labels.points_pre, dir / "points_pre.json");
  save_points(labels.points_post, dir / "points_post.json");
  out << labels.points_pre.size() << " pre and " << labels.points_post.size() << " post pseudo points\n";
  return 0;
}

void print_means(std::ostream& out, const ScoreReport& r) {
  out << std::fixed << std::setprecision(4) << "f1_pre=" << r.mean_f1_pre << " f1_post=" << r.mean_f1_post
      << " f1=" << r.mean_f1 << "\n";
  out.unsetf(std::ios::floatfield);
}

int cmd_score(const ScoreArgs& a, const Settings& settings, std::ostream& out) {
  const auto config = settings.resolve();
  if (!a.from_f1.empty()) {
    const ScoreReport report = aggregate(load_f1_table(a.from_f1));
    if (!a.report.empty()) write_text(a.report, aggregate_report_json(report, config));
    print_means(out, report);
    return 0;
  }
  if (a.pred.empty() || a.gt.empty()) throw Error(ErrorCode::range, "score needs --pred and --gt, or --from-f1");

  std::vector<std::pair<fs::path, fs::path>> volumes;
  if (fs::is_directory(a.gt)) {
    for (const auto& gt : json_files(a.gt)) {
      if (!is_annotation_file(gt)) continue;
      const fs::path pred = fs::path(a.pred) / gt.filename();
      if (!fs::exists(pred)) throw Error(ErrorCode::io, "no prediction file " + pred.string() + " for " + gt.string());
      volumes.emplace_back(pred, gt);
    }
  } else {
    volumes.emplace_back(a.pred, a.gt);
  }
  if (volumes.empty()) throw Error(ErrorCode::io, "no annotation files in " + a.gt);

  std::vector<VolumeScore> scores(volumes.size());
  parallel_for(volumes.size(), config.jobs, [&](std::size_t i) {
    const auto& [pred, gt] = volumes[i];
    scores[i] = score_volume(load_points(pred), load_points(gt), config.cutoff, a.paired, gt.stem().string());
  });
  const ScoreReport report = aggregate(scores);
  const std::string json = score_report_json(scores, report, config, a.paired);
  if (!a.report.empty()) write_text(a.report, json);
  print_means(out, report);
  return 0;
}

int cmd_loss(const LossArgs& a, const Settings& settings, std::ostream& out) {
  const auto config = settings.resolve({{"fg-weight", "fg_weight"}});
  const ProbVolume pred = load_prob(a.pred);
  const MaskVolume target = load_mask(a.target);
  const double w = config.fg_weight ? *config.fg_weight : auto_fg_weight(target);
  out << std::setprecision(12) << wbce(LossSample<float>{pred, target, w}) << "\n";
  return 0;
}

int cmd_synth(const SceneArgs& a, const Settings& settings, std::ostream& out) {
  settings.resolve();
  check_render_params(a.sigma, a.noise);
  const SceneSpec spec = scene_spec(a);
  const AnnotationSet scene = make_scene(spec);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  save_points(scene, dir / "points.json");
  // Same noise seeds as the source render of e2e.
  save_volume(render_probability(scene.positions(PointKind::pre), spec.dims, a.sigma, a.noise, splitmix64(spec.seed)),
              dir / "prob_pre.vol");
  save_volume(
      render_probability(scene.positions(PointKind::post), spec.dims, a.sigma, a.noise, splitmix64(spec.seed + 1)),
      dir / "prob_post.vol");
  out << scene.size() / 2 << " pairs written to " << dir.string() << "\n";
  return 0;
}

int cmd_e2e(const SceneArgs& a, const Settings& settings, std::ostream& out) {
  const auto config = settings.resolve();
  E2ESpec spec;
  spec.scene = scene_spec(a);
  spec.source_sigma = a.sigma;
  spec.source_noise = a.noise;
  spec.target_sigma = a.target_sigma.value_or(a.sigma);
  spec.target_noise = a.target_noise.value_or(a.noise);
  check_render_params(spec.source_sigma, spec.source_noise);
  check_render_params(spec.target_sigma, spec.target_noise);
  std::optional<fs::path> artifacts;
  if (!a.out_dir.empty()) artifacts = fs::path(a.out_dir);
  const E2EResult result = run_e2e(config, spec, artifacts);
  const std::string json = e2e_report_json(result, spec, config);
  if (artifacts) write_text(*artifacts / "report.json", json);
  if (!a.report.empty()) write_text(a.report, json);
  out << json;
  return 0;
}

void emit_error(std::ostream& err, std::string_view code, const std::string& message, const std::string& stage = {}) {
  nlohmann::ordered_json j;
  j["error"]["code"] = code;
  j["error"]["message"] = message;
  if (!stage.empty()) j["error"]["stage"] = stage;
  err << j.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"synvol: synapse detection post-processing toolkit"};
  app.require_subcommand(1);

  std::vector<std::unique_ptr<Settings>> all_settings;
  auto settings_for = [&](CLI::App* sub) -> Settings& {
    all_settings.push_back(std::make_unique<Settings>(sub));
    return *all_settings.back();
  };

  RasterizeArgs ra;
  auto* rasterize = app.add_subcommand("rasterize", "Point annotations to cubic masks");
  rasterize->add_option("--points", ra.points, "Annotation file")->required();
  rasterize->add_option("--dims", ra.dims, "Volume dims D,H,W")->required();
  rasterize->add_option("--kind", ra.kind, "pre or post")->capture_default_str();
  rasterize->add_option("--out", ra.out, "Output volume path")->required();
  rasterize->add_flag("--instances", ra.instances, "Write an instance label volume instead of a mask");
  auto& rasterize_settings = settings_for(rasterize).add("--radius", "radius", "Cube half-width R");

  BlendArgs ba;
  auto* blend_cmd = app.add_subcommand("blend", "Blend overlapping patch predictions");
  blend_cmd->add_option("--plan-from", ba.plan_from, "Full volume dims D,H,W")->required();
  blend_cmd->add_option("--inputs", ba.inputs, "Directory of patch_z_y_x volumes")->required();
  blend_cmd->add_option("--out", ba.out, "Output prob volume")->required();
  auto& blend_settings = settings_for(blend_cmd).add("--patch", "patch", "Patch dims D,H,W");

  SplitArgs sa;
  auto* split = app.add_subcommand("split", "Cut a prob volume into planned patches");
  split->add_option("--prob", sa.prob, "Input prob volume")->required();
  split->add_option("--out-dir", sa.out_dir, "Directory for patch_z_y_x volumes")->required();
  auto& split_settings = settings_for(split).add("--patch", "patch", "Patch dims D,H,W");

  DetectArgs da;
  auto* detect_cmd = app.add_subcommand("detect", "Threshold, label components, extract centroids");
  detect_cmd->add_option("--prob", da.prob, "Prob (or mask) volume")->required();
  detect_cmd->add_option("--kind", da.kind, "pre or post")->capture_default_str();
  detect_cmd->add_option("--out", da.out, "Output detections JSON")->required();
  auto& detect_settings = settings_for(detect_cmd)
                              .add("--gamma", "gamma", "Threshold (default by kind: 0.75 pre, 0.65 post)")
                              .add("--connectivity", "connectivity", "6 or 26")
                              .add("--min-size", "min_size", "Minimum component size");

  MatchArgs ma;
  auto* match = app.add_subcommand("match", "Pair each post with its nearest pre");
  match->add_option("--pre", ma.pre, "Pre detections")->required();
  match->add_option("--post", ma.post, "Post detections")->required();
  match->add_option("--out", ma.out, "Combined annotation set with partner links")->required();
  match->add_option("--pairs-out", ma.pairs_out, "Optional pair list with distances");
  auto& match_settings = settings_for(match);

  PseudoArgs pa;
  auto* pseudo = app.add_subcommand("pseudo", "Generate pseudo labels from target probabilities");
  pseudo->add_option("--prob-pre", pa.prob_pre, "Pre prob volume")->required();
  pseudo->add_option("--prob-post", pa.prob_post, "Post prob volume")->required();
  pseudo->add_option("--out-dir", pa.out_dir, "Output directory")->required();
  pseudo->add_option("--mode", pa.mode, "squares or segmentation")->capture_default_str();
  auto& pseudo_settings = settings_for(pseudo)
                              .add("--gamma-pre", "gamma_pre", "Pre threshold")
                              .add("--gamma-post", "gamma_post", "Post threshold")
                              .add("--radius", "radius", "Cube half-width R")
                              .add("--connectivity", "connectivity", "6 or 26")
                              .add("--min-size", "min_size", "Minimum component size");

  ScoreArgs sc;
  auto* score_cmd = app.add_subcommand("score", "Assignment-based F1 scoring");
  score_cmd->add_option("--pred", sc.pred, "Prediction file or directory");
  score_cmd->add_option("--gt", sc.gt, "Ground-truth file or directory");
  score_cmd->add_flag("--paired", sc.paired, "Require matching partners for post TPs");
  score_cmd->add_option("--report", sc.report, "Report JSON path");
  score_cmd->add_option("--from-f1", sc.from_f1, "Aggregate a per-volume F1 table instead");
  auto& score_settings = settings_for(score_cmd).add("--cutoff", "cutoff", "Match distance cutoff (voxels)");

  LossArgs la;
  auto* loss = app.add_subcommand("loss", "Weighted BCE between a prob volume and a mask");
  loss->add_option("--pred", la.pred, "Prob volume")->required();
  loss->add_option("--target", la.target, "Mask volume")->required();
  auto& loss_settings = settings_for(loss).add("--fg-weight", "fg-weight", "auto or a positive number");

  SceneArgs sy;
  auto* synth = app.add_subcommand("synth", "Synthetic scene and probability renders");
  add_scene_options(synth, sy);
  synth->add_option("--out-dir", sy.out_dir, "Output directory")->required();
  auto& synth_settings = settings_for(synth);

  SceneArgs ee;
  ee.dims = "256,256,256";
  ee.pairs = 100;
  ee.seed = 42;
  auto* e2e = app.add_subcommand("e2e", "Two-stage pipeline on a synthetic scene");
  add_scene_options(e2e, ee);
  e2e->add_option("--target-sigma", ee.target_sigma, "Target render sigma (default: --sigma)");
  e2e->add_option("--target-noise", ee.target_noise, "Target noise amplitude (default: --noise)");
  e2e->add_option("--out-dir", ee.out_dir, "Artifact directory");
  e2e->add_option("--report", ee.report, "Report JSON path");
  auto& e2e_settings = settings_for(e2e)
                           .add("--gamma-pre", "gamma_pre", "Pre threshold")
                           .add("--gamma-post", "gamma_post", "Post threshold")
                           .add("--radius", "radius", "Cube half-width R")
                           .add("--connectivity", "connectivity", "6 or 26")
                           .add("--min-size", "min_size", "Minimum component size")
                           .add("--cutoff", "cutoff", "Match distance cutoff")
                           .add("--patch", "patch", "Patch dims D,H,W");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    emit_error(err, "usage_error", e.what());
    return 2;
  }

  try {
    if (rasterize->parsed()) return cmd_rasterize(ra, rasterize_settings, out);
    if (blend_cmd->parsed()) return cmd_blend(ba, blend_settings, out);
    if (split->parsed()) return cmd_split(sa, split_settings, out);
    if (detect_cmd->parsed()) return cmd_detect(da, detect_settings, out);
    if (match->parsed()) return cmd_match(ma, match_settings, out);
    if (pseudo->parsed()) return cmd_pseudo(pa, pseudo_settings, out);
    if (score_cmd->parsed()) return cmd_score(sc, score_settings, out);
    if (loss->parsed()) return cmd_loss(la, loss_settings, out);
    if (synth->parsed()) return cmd_synth(sy, synth_settings, out);
    if (e2e->parsed()) return cmd_e2e(ee, e2e_settings, out);
  } catch (const StageError& e) {
    emit_error(err, to_string(e.code()), e.what(), e.stage());
    return 1;
  } catch (const Error& e) {
    emit_error(err, to_string(e.code()), e.what());
    return 1;
  } catch (const fs::filesystem_error& e) {
    emit_error(err, to_string(ErrorCode::io), e.what());
    return 1;
  } catch (const std::exception& e) {
    emit_error(err, "internal_error", e.what());
    return 1;
  }
  emit_error(err, "usage_error", "no subcommand");
  return 2;
}

}  // namespace synvol::cli

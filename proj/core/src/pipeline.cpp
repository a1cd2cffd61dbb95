#include "synvol/pipeline.hpp"

#include <array>

#include "synvol/detect.hpp"
#include "synvol/io.hpp"
#include "synvol/parallel.hpp"
#include "synvol/tile.hpp"

namespace synvol {

namespace fs = std::filesystem;

namespace {

template <typename Fn>
auto staged(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

StageOutput finish_stage(std::vector<Detection> pre, std::vector<Detection> post, Dims dims,
                         const PipelineConfig& config, const AnnotationSet& gt, const std::string& name) {
  StageOutput out;
  out.pres = to_annotations(pre, PointKind::pre, dims);
  out.posts = to_annotations(post, PointKind::post, dims);
  out.pairing = match_nearest(out.posts.sites(PointKind::post), out.pres.sites(PointKind::pre));
  out.combined = combine_pairs(out.pres, out.posts, out.pairing);
  out.score = score_volume(out.combined, gt, config.cutoff, /*paired=*/true, name);
  return out;
}

void write_stage(const StageOutput& s, const fs::path& dir) {
  fs::create_directories(dir);
  save_points(s.pres, dir / "pre.json");
  save_points(s.posts, dir / "post.json");
  save_points(s.combined, dir / "scene.json");
}

Dims fit_patch(Dims patch, Dims volume) {
  return {std::min(patch.d, volume.d), std::min(patch.h, volume.h), std::min(patch.w, volume.w)};
}

}  // namespace

StageOutput run_stage(const ProbVolume& prob_pre, const ProbVolume& prob_post, const PipelineConfig& config,
                      const AnnotationSet& gt, const std::string& name) {
  const auto conn = connectivity_from_int(config.connectivity);
  auto pre = detect(prob_pre, {config.gamma_pre, conn, config.min_size});
  auto post = detect(prob_post, {config.gamma_post, conn, config.min_size});
  return finish_stage(std::move(pre), std::move(post), prob_pre.dims(), config, gt, name);
}

StageOutput run_stage_masks(const MaskVolume& mask_pre, const MaskVolume& mask_post, const PipelineConfig& config,
                            const AnnotationSet& gt, const std::string& name) {
  const auto conn = connectivity_from_int(config.connectivity);
  auto pre = detect_mask(mask_pre, conn, config.min_size);
  auto post = detect_mask(mask_post, conn, config.min_size);
  return finish_stage(std::move(pre), std::move(post), mask_pre.dims(), config, gt, name);
}

E2EResult run_e2e(const PipelineConfig& config, const E2ESpec& spec, const std::optional<fs::path>& artifacts) {
  staged("config", [&] { validate(config); });
  E2EResult result;
  result.ground_truth = staged("synth", [&] { return make_scene(spec.scene); });
  const Dims dims = spec.scene.dims;
  const auto pre_centers = result.ground_truth.positions(PointKind::pre);
  const auto post_centers = result.ground_truth.positions(PointKind::post);

  // source pre, source post, target pre, target post
  std::array<ProbVolume, 4> probs;
  staged("render", [&] {
    const PatchPlan plan = plan_patches(dims, fit_patch(config.patch, dims));
    parallel_for(probs.size(), config.jobs, [&](std::size_t k) {
      const bool target = k >= 2;
      const auto& centers = (k % 2 == 0) ? pre_centers : post_centers;
      const double sigma = target ? spec.target_sigma : spec.source_sigma;
      const double noise = target ? spec.target_noise : spec.source_noise;
      ProbVolume full = render_probability(centers, dims, sigma, noise, splitmix64(spec.scene.seed + k));
      if (!target) {
        probs[k] = std::move(full);
        return;
      }
      // Target predictions arrive patch by patch, as a sliding-window model would produce them.
      probs[k] = infer_tiled(plan, [&](Coord offset, Dims patch) { return crop(full, offset, patch); });
    });
  });

  result.source = staged("source", [&] { return run_stage(probs[0], probs[1], config, result.ground_truth, "source"); });
  result.stage1 = staged("stage1", [&] { return run_stage(probs[2], probs[3], config, result.ground_truth, "stage1"); });
  result.pseudo = staged("pseudo", [&] {
    PseudoParams params{config.thresholds(), config.radius, connectivity_from_int(config.connectivity),
                        config.min_size};
    return generate_pseudo_labels(probs[2], probs[3], params);
  });
  result.stage2 = staged("stage2", [&] {
    return run_stage_masks(result.pseudo.mask_pre, result.pseudo.mask_post, config, result.ground_truth, "stage2");
  });

  if (artifacts) {
    staged("artifacts", [&] {
      const fs::path& root = *artifacts;
      try {
        fs::create_directories(root / "gt");
        fs::create_directories(root / "source");
        fs::create_directories(root / "target");
        fs::create_directories(root / "pseudo");
      } catch (const fs::filesystem_error& e) {
        throw Error(ErrorCode::io, e.what());
      }
      save_points(result.ground_truth, root / "gt" / "scene.json");
      save_volume(probs[0], root / "source" / "prob_pre.vol");
      save_volume(probs[1], root / "source" / "prob_post.vol");
      save_volume(probs[2], root / "target" / "prob_pre.vol");
      save_volume(probs[3], root / "target" / "prob_post.vol");
      write_stage(result.source, root / "source");
      write_stage(result.stage1, root / "stage1");
      save_volume(result.pseudo.mask_pre, root / "pseudo" / "mask_pre.vol");
      save_volume(result.pseudo.mask_post, root / "pseudo" / "mask_post.vol");
      save_points(result.pseudo.points_pre, root / "pseudo" / "points_pre.json");
      save_points(result.pseudo.points_post, root / "pseudo" / "points_post.json");
      write_stage(result.stage2, root / "stage2");
    });
  }
  return result;
}

}  // namespace synvol

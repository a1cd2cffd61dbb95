#pragma once

// Two-stage synthetic demonstration: scene -> rendered source/target
// probabilities -> stage 1 detection and pairing -> pseudo labels on the
// target -> stage 2 re-detection -> scores for both stages.

#include <filesystem>
#include <optional>
#include <string>

#include "synvol/annotation.hpp"
#include "synvol/config.hpp"
#include "synvol/pair.hpp"
#include "synvol/pseudo.hpp"
#include "synvol/score.hpp"
#include "synvol/synth.hpp"

namespace synvol {

struct E2ESpec {
  SceneSpec scene;
  double source_sigma = 1.5;
  double source_noise = 0.0;
  double target_sigma = 1.5;
  double target_noise = 0.0;
};

/// Stage-tagged failure from run_e2e.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.code(), stage + ": " + cause.what()), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// Detections of both classes plus post->pre pairing, as one combined set.
struct StageOutput {
  AnnotationSet pres;
  AnnotationSet posts;
  Pairing pairing;
  AnnotationSet combined;
  VolumeScore score;
};

struct E2EResult {
  AnnotationSet ground_truth;
  StageOutput source;  // stage-1 model on the source render, for reference
  StageOutput stage1;  // stage-1 detections on the target render
  StageOutput stage2;  // re-detection from target pseudo labels
  PseudoLabels pseudo;
};

/// Detect both classes from probability (or mask, cast to prob) volumes,
/// pair posts to pres and score against `gt` with the paired post rule.
StageOutput run_stage(const ProbVolume& prob_pre, const ProbVolume& prob_post, const PipelineConfig& config,
                      const AnnotationSet& gt, const std::string& name);
StageOutput run_stage_masks(const MaskVolume& mask_pre, const MaskVolume& mask_post, const PipelineConfig& config,
                            const AnnotationSet& gt, const std::string& name);

/// Runs the whole pipeline. When `artifacts` is set, every intermediate
/// volume and point set is written there (layout documented in the README).
E2EResult run_e2e(const PipelineConfig& config, const E2ESpec& spec,
                  const std::optional<std::filesystem::path>& artifacts = std::nullopt);

}  // namespace synvol

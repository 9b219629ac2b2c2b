#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "darcnn/types.hpp"

namespace darcnn {

struct SceneConfig {
  double image_w = 1000.0;
  double image_h = 800.0;
  int n_persons = 20;
  // Target fraction of persons with a partner of body IoU > 0.5.
  double crowd_intensity = 0.5;
  double body_w_min = 40.0;
  double body_w_max = 100.0;
  // Body height / width.
  double body_aspect_min = 1.8;
  double body_aspect_max = 2.8;
  // Head width / body width. Head height is 1.2x its width.
  double head_ratio_min = 0.28;
  double head_ratio_max = 0.40;
  std::uint64_t seed = 0;

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

struct DetectorNoise {
  // Localization jitter: std of center offset (relative to box size) and of log size.
  double head_jitter = 0.05;
  double body_jitter = 0.10;
  // A missed part is badly localized and scored like a false positive; a person
  // with both parts missed yields no detection.
  double head_miss_prob = 0.05;
  double body_miss_prob = 0.05;
  // Mean number of false-positive pairs per image.
  double fp_per_image = 4.0;
  // Share of false positives that re-detect a person's head with a partial body.
  double fp_duplicate_fraction = 0.5;
  // Scores are sigmoid(mean + std * N(0, 1)) in logit space.
  double head_tp_score_mean = 2.0;
  double head_tp_score_std = 1.0;
  double head_fp_score_mean = -1.0;
  double head_fp_score_std = 1.0;
  double body_tp_score_mean = 2.0;
  double body_tp_score_std = 1.0;
  double body_fp_score_mean = -1.0;
  double body_fp_score_std = 1.0;
  // Subtracted from a person's body-score logit mean, scaled by the largest
  // share of its body covered by another person. Heads are not penalized.
  double occlusion_body_score_penalty = 0.0;
  // Logit mean of both scores of a duplicate false positive (std: the part's FP std).
  double dup_score_mean = 0.5;
  // Branch proposals: principal part jittered lightly, attached part heavily.
  double principal_jitter = 0.05;
  double attached_jitter = 0.35;
  int proposals_per_person = 4;
  int background_proposals = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

// Persons are placed in clusters of 2-3 with mutual body IoU > 0.5 (the crowded
// share) and as singletons with body IoU <= 0.5 to everyone else. Throws
// GenerationError when placement keeps failing.
Scene generate_scene(const SceneConfig& cfg, const std::string& image_id = "0");

// Fraction of persons having another person with body IoU > 0.5.
double crowding_fraction(std::span<const GtPair> persons);

std::vector<DetectionPair> simulate_detections(const Scene& scene, const DetectorNoise& noise);

std::vector<PairedProposal> simulate_branch_proposals(const Scene& scene,
                                                      const DetectorNoise& noise, Part principal);

}  // namespace darcnn

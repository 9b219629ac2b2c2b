#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "darcnn/eval.hpp"
#include "darcnn/jnms.hpp"
#include "darcnn/simscene.hpp"
#include "darcnn/types.hpp"

namespace darcnn {

// Per-item copy of a config with its seed derived from (base_seed, index).
SceneConfig scene_config_for(const SceneConfig& cfg, std::uint64_t base_seed, std::size_t index);
DetectorNoise noise_for(const DetectorNoise& noise, std::uint64_t base_seed, std::size_t index);

struct CrossoverCounts {
  std::size_t n_positive_hb = 0;
  std::size_t qualified_before = 0;
  std::size_t qualified_after = 0;
};

// Simulates both branches on one scene, keeps each branch's positives, and
// counts qualified head-body pairs before and after crossover.
CrossoverCounts crossover_counts(const Scene& scene, const DetectorNoise& noise,
                                 double thresh = 0.5);

// Boxes of one part scored with the given per-pair scores.
ImageDetections scored_part(std::span<const DetectionPair> pairs, std::span<const double> scores,
                            Part part);

struct Suppressed {
  std::vector<std::size_t> kept;  // input indices, rank order
  std::vector<double> scores;     // ranking score of each kept pair
};

// Body-only classic NMS ranked by body score.
Suppressed suppress_body_only(std::span<const DetectionPair> pairs, double omega);
Suppressed suppress_joint(std::span<const DetectionPair> pairs, const NmsConfig& config);

}  // namespace darcnn

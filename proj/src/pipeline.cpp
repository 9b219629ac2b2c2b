#include "darcnn/pipeline.hpp"

#include "darcnn/crossover.hpp"
#include "darcnn/rng.hpp"

namespace darcnn {

SceneConfig scene_config_for(const SceneConfig& cfg, std::uint64_t base_seed, std::size_t index) {
  SceneConfig out = cfg;
  out.seed = derive_seed(base_seed, index);
  return out;
}

DetectorNoise noise_for(const DetectorNoise& noise, std::uint64_t base_seed, std::size_t index) {
  DetectorNoise out = noise;
  out.seed = derive_seed(base_seed, index);
  return out;
}

CrossoverCounts crossover_counts(const Scene& scene, const DetectorNoise& noise, double thresh) {
  const auto hb = simulate_branch_proposals(scene, noise, Part::head);
  const auto bh = simulate_branch_proposals(scene, noise, Part::body);
  const auto hb_pos = positive_pairs(hb, label_pairs(hb, scene.persons));
  const auto bh_pos = positive_pairs(bh, label_pairs(bh, scene.persons));
  const auto crossed = crossover(hb_pos, bh_pos);

  CrossoverCounts counts;
  counts.n_positive_hb = hb_pos.size();
  counts.qualified_before = count_qualified(hb_pos, scene.persons, thresh);
  counts.qualified_after = count_qualified(crossed, scene.persons, thresh);
  return counts;
}

ImageDetections scored_part(std::span<const DetectionPair> pairs, std::span<const double> scores,
                            Part part) {
  ImageDetections out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out.push_back(ScoredBox{part == Part::head ? pairs[i].head : pairs[i].body, scores[i]});
  }
  return out;
}

Suppressed suppress_body_only(std::span<const DetectionPair> pairs, double omega) {
  std::vector<Box> bodies;
  std::vector<double> scores;
  for (const auto& p : pairs) {
    bodies.push_back(p.body);
    scores.push_back(p.body_score);
  }
  Suppressed out;
  out.kept = original_nms(bodies, scores, omega);
  for (std::size_t i : out.kept) {
    out.scores.push_back(scores[i]);
  }
  return out;
}

Suppressed suppress_joint(std::span<const DetectionPair> pairs, const NmsConfig& config) {
  Suppressed out;
  out.kept = joint_nms(pairs, config);
  for (std::size_t i : out.kept) {
    out.scores.push_back(joint_score(pairs[i], config.lambda));
  }
  return out;
}

}  // namespace darcnn

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "darcnn/geom.hpp"
#include "darcnn/types.hpp"

namespace darcnn {

struct NmsConfig {
  double omega_h = 0.5;  // head IoU threshold
  double omega_b = 0.5;  // body IoU threshold
  double lambda = 0.8;   // weight of the body score

  // Throws ConfigError if any field lies outside [0, 1].
  void validate() const;
};

// lambda * s_body + (1 - lambda) * s_head
double joint_score(const DetectionPair& pair, double lambda);

// Greedy suppression over head/body pairs. The highest joint-score pair is kept
// and every remaining pair with head IoU > omega_h OR body IoU > omega_b against
// it is removed, until no pair is left. Returns kept input indices in descending
// joint-score order; equal scores favour the lower index.
std::vector<std::size_t> joint_nms(std::span<const DetectionPair> pairs, const NmsConfig& config);

// Classic single-box greedy NMS, suppressing on IoU > omega.
std::vector<std::size_t> original_nms(std::span<const Box> boxes, std::span<const double> scores,
                                      double omega);

// Reference for joint_nms: rescans the remaining set on every step.
std::vector<std::size_t> joint_nms_oracle(std::span<const DetectionPair> pairs,
                                          const NmsConfig& config);

}  // namespace darcnn

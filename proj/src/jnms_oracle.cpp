#include <vector>

#include "darcnn/jnms.hpp"

namespace darcnn {

std::vector<std::size_t> joint_nms_oracle(std::span<const DetectionPair> pairs,
                                          const NmsConfig& config) {
  config.validate();

  std::vector<std::size_t> remaining;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    remaining.push_back(i);
  }

  std::vector<std::size_t> result;
  while (!remaining.empty()) {
    // Highest blended score; the first (lowest-index) maximum wins.
    std::size_t best_pos = 0;
    for (std::size_t k = 1; k < remaining.size(); ++k) {
      if (joint_score(pairs[remaining[k]], config.lambda) >
          joint_score(pairs[remaining[best_pos]], config.lambda)) {
        best_pos = k;
      }
    }
    const std::size_t top = remaining[best_pos];
    result.push_back(top);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));

    std::vector<std::size_t> survivors;
    for (std::size_t idx : remaining) {
      const double overlap_head = iou(pairs[top].head, pairs[idx].head);
      const double overlap_body = iou(pairs[top].body, pairs[idx].body);
      const bool suppressed = overlap_head > config.omega_h || overlap_body > config.omega_b;
      if (!suppressed) {
        survivors.push_back(idx);
      }
    }
    remaining = survivors;
  }
  return result;
}

}  // namespace darcnn

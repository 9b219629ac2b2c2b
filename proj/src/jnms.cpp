#include "darcnn/jnms.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "darcnn/error.hpp"

namespace darcnn {

void NmsConfig::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ConfigError(std::string("nms config: ") + name + " must lie in [0, 1]");
    }
  };
  check(omega_h, "omega_h");
  check(omega_b, "omega_b");
  check(lambda, "lambda");
}

double joint_score(const DetectionPair& pair, double lambda) {
  return lambda * pair.body_score + (1.0 - lambda) * pair.head_score;
}

namespace {

std::vector<std::size_t> order_by_score(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

}  // namespace

std::vector<std::size_t> joint_nms(std::span<const DetectionPair> pairs, const NmsConfig& config) {
  config.validate();

  std::vector<double> scores(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    scores[i] = joint_score(pairs[i], config.lambda);
  }
  const std::vector<std::size_t> order = order_by_score(scores);

  std::vector<bool> removed(order.size(), false);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (removed[i]) {
      continue;
    }
    const DetectionPair& top = pairs[order[i]];
    kept.push_back(order[i]);
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (removed[j]) {
        continue;
      }
      const DetectionPair& other = pairs[order[j]];
      if (iou(top.head, other.head) > config.omega_h ||
          iou(top.body, other.body) > config.omega_b) {
        removed[j] = true;
      }
    }
  }
  return kept;
}

std::vector<std::size_t> original_nms(std::span<const Box> boxes, std::span<const double> scores,
                                      double omega) {
  if (boxes.size() != scores.size()) {
    throw std::invalid_argument("original_nms: boxes and scores differ in length");
  }
  const std::vector<std::size_t> order = order_by_score(scores);

  std::vector<bool> removed(order.size(), false);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (removed[i]) {
      continue;
    }
    kept.push_back(order[i]);
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (!removed[j] && iou(boxes[order[i]], boxes[order[j]]) > omega) {
        removed[j] = true;
      }
    }
  }
  return kept;
}

}  // namespace darcnn

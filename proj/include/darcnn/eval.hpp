#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "darcnn/geom.hpp"
#include "darcnn/types.hpp"

namespace darcnn {

struct ScoredBox {
  Box box;
  double score = 0.0;
};

struct MatchResult {
  std::vector<std::optional<std::size_t>> det_matched_gt;
  std::vector<bool> det_is_tp;
  std::vector<bool> gt_matched;

  std::size_t true_positives() const;
  std::size_t false_positives() const;
};

// Score-greedy matching: detections in descending score (stable on input
// order) each take the highest-IoU unmatched ground truth with IoU >= iou_thresh.
MatchResult match_detections(std::span<const ScoredBox> dets, std::span<const Box> gts,
                             double iou_thresh = 0.5);

struct OperatingPoint {
  double score_threshold = 0.0;
  std::size_t n_true_positive = 0;
  std::size_t n_false_positive = 0;
  std::size_t n_ground_truth = 0;
  double fppi = 0.0;
  double miss_rate = 1.0;
  double recall = 0.0;
};

// One operating point per distinct detection score, thresholds decreasing.
struct EvalCurve {
  std::size_t n_images = 0;
  std::size_t n_ground_truth = 0;
  std::vector<OperatingPoint> points;
};

using ImageDetections = std::vector<ScoredBox>;
using ImageGroundTruth = std::vector<Box>;

// Throws DomainError when there are no ground truths at all.
EvalCurve fppi_mr_curve(std::span<const ImageDetections> dets,
                        std::span<const ImageGroundTruth> gts, double iou_thresh = 0.5);

// FPPI reference points 10^(-2 + k/4), k = 0..8.
inline constexpr std::array<double, 9> kMrReferenceFppi = {
    0.01, 0.01778279410038923, 0.03162277660168379, 0.05623413251903491, 0.1,
    0.1778279410038923, 0.31622776601683794, 0.5623413251903491, 1.0};

inline constexpr double kMissRateFloor = 1e-10;

// Geometric mean of the miss rate at the 9 reference FPPI values. At each
// reference f the best miss rate among points with fppi <= f is used, or 1.0
// when no point qualifies.
double log_average_mr(const EvalCurve& curve);

// 101-point interpolated AP over recall {0, 0.01, ..., 1}.
double ap50(const EvalCurve& curve);
double ap50(std::span<const ImageDetections> dets, std::span<const ImageGroundTruth> gts);

inline constexpr std::array<double, 4> kDefaultRecalls = {0.2, 0.4, 0.6, 0.8};

// Minimum FPPI over points with recall >= target; +infinity when unreachable.
std::vector<double> fppi_at_recall(const EvalCurve& curve,
                                   std::span<const double> recalls = kDefaultRecalls);

inline constexpr double kCrowdedIou = 0.5;

// True iff two distinct persons have body IoU > 0.5.
bool is_crowded(std::span<const GtPair> persons);

std::vector<Scene> crowded_subset(std::span<const Scene> scenes);

}  // namespace darcnn

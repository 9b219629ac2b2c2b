#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "darcnn/geom.hpp"
#include "darcnn/types.hpp"

namespace darcnn {

enum class AnchorLabel { positive, negative, ignore };

std::string_view to_string(AnchorLabel label);

struct AnchorAssignment {
  std::size_t anchor_index = 0;
  AnchorLabel label = AnchorLabel::negative;
  std::optional<PersonId> matched_gt;
  std::optional<BoxDelta> head_target;
  std::optional<BoxDelta> body_target;
};

struct AssignConfig {
  double pos_iou = 0.7;
  double neg_iou = 0.3;
  // Force the best anchor of each ground truth positive even below pos_iou.
  bool best_anchor_fallback = true;
};

// Labels anchors against the principal part of each ground truth. A positive
// anchor regresses both parts of the single highest-IoU person from the same
// anchor. Anchors with max IoU < neg_iou are negative, the rest ignored.
// Throws ConfigError unless 0 <= neg_iou <= pos_iou <= 1.
std::vector<AnchorAssignment> assign_principal(std::span<const Box> anchors,
                                               std::span<const GtPair> gts, Part principal,
                                               const AssignConfig& config = {});

struct RpnPrediction {
  double logit = 0.0;
  BoxDelta head_delta;
  BoxDelta body_delta;
};

struct RpnLoss {
  double total = 0.0;
  double cls = 0.0;
  double head_reg = 0.0;
  double body_reg = 0.0;
};

inline constexpr double kSmoothL1Beta = 1.0;

double smooth_l1(double x, double beta = kSmoothL1Beta);
double smooth_l1_grad(double x, double beta = kSmoothL1Beta);

// L = L_cls + L_reg^head + L_reg^body.
//   cls: mean binary cross-entropy over positive and negative anchors.
//   reg: Smooth-L1 averaged over positive anchors and the 4 delta components.
// Regression terms are 0 without positives. Throws DomainError when no anchor is
// positive or negative, std::invalid_argument when the inputs are not index-aligned.
RpnLoss rpn_loss(std::span<const RpnPrediction> predictions,
                 std::span<const AnchorAssignment> assignments);

// d(total)/d(prediction), laid out like the predictions.
std::vector<RpnPrediction> rpn_loss_grad(std::span<const RpnPrediction> predictions,
                                         std::span<const AnchorAssignment> assignments);

// Decodes the top_k anchors by objectness into paired proposals clipped to the
// image. Equal logits rank the lower anchor index first. Proposals whose head or
// body is empty after clipping are dropped.
std::vector<PairedProposal> emit_proposals(std::span<const RpnPrediction> predictions,
                                           std::span<const Box> anchors, std::size_t top_k,
                                           Part principal, const ImageSize& image);

}  // namespace darcnn

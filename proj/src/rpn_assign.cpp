#include "darcnn/rpn_assign.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "darcnn/error.hpp"

namespace darcnn {

std::string_view to_string(AnchorLabel label) {
  switch (label) {
    case AnchorLabel::positive:
      return "positive";
    case AnchorLabel::negative:
      return "negative";
    case AnchorLabel::ignore:
      return "ignore";
  }
  return "unknown";
}

std::vector<AnchorAssignment> assign_principal(std::span<const Box> anchors,
                                               std::span<const GtPair> gts, Part principal,
                                               const AssignConfig& config) {
  if (!(0.0 <= config.neg_iou && config.neg_iou <= config.pos_iou && config.pos_iou <= 1.0)) {
    throw ConfigError("assign_principal: need 0 <= neg_iou <= pos_iou <= 1");
  }

  const std::size_t n = anchors.size();
  std::vector<double> best_iou(n, 0.0);
  std::vector<std::optional<std::size_t>> best_gt(n);

  // Per ground truth: the anchor with the highest IoU (lowest index on ties).
  std::vector<double> gt_best_iou(gts.size(), 0.0);
  std::vector<std::optional<std::size_t>> gt_best_anchor(gts.size());

  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double o = iou(anchors[a], gts[g].part(principal));
      if (o > best_iou[a]) {
        best_iou[a] = o;
        best_gt[a] = g;
      }
      if (o > gt_best_iou[g]) {
        gt_best_iou[g] = o;
        gt_best_anchor[g] = a;
      }
    }
  }

  std::vector<bool> forced(n, false);
  if (config.best_anchor_fallback) {
    for (const auto& a : gt_best_anchor) {
      if (a) {
        forced[*a] = true;
      }
    }
  }

  std::vector<AnchorAssignment> out(n);
  for (std::size_t a = 0; a < n; ++a) {
    AnchorAssignment& rec = out[a];
    rec.anchor_index = a;
    if (best_gt[a] && (best_iou[a] > config.pos_iou || forced[a])) {
      const GtPair& gt = gts[*best_gt[a]];
      rec.label = AnchorLabel::positive;
      rec.matched_gt = gt.person_id;
      rec.head_target = encode(anchors[a], gt.head);
      rec.body_target = encode(anchors[a], gt.body);
    } else if (best_iou[a] < config.neg_iou) {
      rec.label = AnchorLabel::negative;
    } else {
      rec.label = AnchorLabel::ignore;
    }
  }
  return out;
}

double smooth_l1(double x, double beta) {
  const double ax = std::abs(x);
  return ax < beta ? 0.5 * x * x / beta : ax - 0.5 * beta;
}

double smooth_l1_grad(double x, double beta) {
  if (std::abs(x) < beta) {
    return x / beta;
  }
  return x > 0.0 ? 1.0 : -1.0;
}

namespace {

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct SampleCounts {
  std::size_t sampled = 0;
  std::size_t positive = 0;
};

SampleCounts check_inputs(std::span<const RpnPrediction> predictions,
                          std::span<const AnchorAssignment> assignments) {
  if (predictions.size() != assignments.size()) {
    throw std::invalid_argument("rpn_loss: predictions and assignments differ in length");
  }
  SampleCounts counts;
  for (const auto& a : assignments) {
    if (a.label == AnchorLabel::positive) {
      if (!a.head_target || !a.body_target) {
        throw std::invalid_argument("rpn_loss: positive assignment without targets");
      }
      ++counts.positive;
      ++counts.sampled;
    } else if (a.label == AnchorLabel::negative) {
      ++counts.sampled;
    }
  }
  if (counts.sampled == 0) {
    throw DomainError("rpn_loss: no positive or negative anchors");
  }
  return counts;
}

double delta_loss(const BoxDelta& pred, const BoxDelta& target) {
  return smooth_l1(pred.dx - target.dx) + smooth_l1(pred.dy - target.dy) +
         smooth_l1(pred.dw - target.dw) + smooth_l1(pred.dh - target.dh);
}

BoxDelta delta_grad(const BoxDelta& pred, const BoxDelta& target, double scale) {
  return BoxDelta{
      scale * smooth_l1_grad(pred.dx - target.dx),
      scale * smooth_l1_grad(pred.dy - target.dy),
      scale * smooth_l1_grad(pred.dw - target.dw),
      scale * smooth_l1_grad(pred.dh - target.dh),
  };
}

}  // namespace

RpnLoss rpn_loss(std::span<const RpnPrediction> predictions,
                 std::span<const AnchorAssignment> assignments) {
  const SampleCounts counts = check_inputs(predictions, assignments);

  double cls = 0.0;
  double head = 0.0;
  double body = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& p = predictions[i];
    const auto& a = assignments[i];
    if (a.label == AnchorLabel::positive) {
      cls += softplus(-p.logit);
      head += delta_loss(p.head_delta, *a.head_target);
      body += delta_loss(p.body_delta, *a.body_target);
    } else if (a.label == AnchorLabel::negative) {
      cls += softplus(p.logit);
    }
  }

  RpnLoss loss;
  loss.cls = cls / static_cast<double>(counts.sampled);
  if (counts.positive > 0) {
    const double denom = 4.0 * static_cast<double>(counts.positive);
    loss.head_reg = head / denom;
    loss.body_reg = body / denom;
  }
  loss.total = loss.cls + loss.head_reg + loss.body_reg;
  return loss;
}

std::vector<RpnPrediction> rpn_loss_grad(std::span<const RpnPrediction> predictions,
                                         std::span<const AnchorAssignment> assignments) {
  const SampleCounts counts = check_inputs(predictions, assignments);
  const double cls_scale = 1.0 / static_cast<double>(counts.sampled);
  const double reg_scale =
      counts.positive > 0 ? 1.0 / (4.0 * static_cast<double>(counts.positive)) : 0.0;

  std::vector<RpnPrediction> grad(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& p = predictions[i];
    const auto& a = assignments[i];
    if (a.label == AnchorLabel::positive) {
      grad[i].logit = cls_scale * (sigmoid(p.logit) - 1.0);
      grad[i].head_delta = delta_grad(p.head_delta, *a.head_target, reg_scale);
      grad[i].body_delta = delta_grad(p.body_delta, *a.body_target, reg_scale);
    } else if (a.label == AnchorLabel::negative) {
      grad[i].logit = cls_scale * sigmoid(p.logit);
    }
  }
  return grad;
}

std::vector<PairedProposal> emit_proposals(std::span<const RpnPrediction> predictions,
                                           std::span<const Box> anchors, std::size_t top_k,
                                           Part principal, const ImageSize& image) {
  if (predictions.size() != anchors.size()) {
    throw std::invalid_argument("emit_proposals: predictions and anchors differ in length");
  }
  if (top_k == 0) {
    throw ConfigError("emit_proposals: top_k must be >= 1");
  }

  std::vector<std::size_t> order(predictions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return predictions[a].logit > predictions[b].logit;
  });
  order.resize(std::min(top_k, order.size()));

  std::vector<PairedProposal> out;
  out.reserve(order.size());
  for (std::size_t i : order) {
    const auto& p = predictions[i];
    const Box head = clip(decode(anchors[i], p.head_delta), image);
    const Box body = clip(decode(anchors[i], p.body_delta), image);
    if (!head.valid() || !body.valid()) {
      continue;
    }
    out.push_back(PairedProposal{head, body, sigmoid(p.logit), principal, branch_for(principal)});
  }
  return out;
}

}  // namespace darcnn

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "darcnn/types.hpp"

namespace darcnn {

struct PairLabel {
  std::size_t proposal_index = 0;
  bool positive = false;
  std::optional<PersonId> matched_gt;
  // Overlaps with the person whose principal part overlaps most (0 if none).
  double head_iou = 0.0;
  double body_iou = 0.0;
};

// A pair is positive iff its principal part has IoU > principal_iou with the
// same part of some ground truth. Only the principal part is checked.
std::vector<PairLabel> label_pairs(std::span<const PairedProposal> pairs,
                                   std::span<const GtPair> gts, double principal_iou = 0.5);

// The positively labelled pairs, in input order.
std::vector<PairedProposal> positive_pairs(std::span<const PairedProposal> pairs,
                                           std::span<const PairLabel> labels);

// Replaces the body of each head-body pair with the body-head body of maximum
// overlap when that overlap exceeds xover_iou. Heads and scores are kept; equal
// overlaps pick the lower donor index; a donor may serve several recipients.
std::vector<PairedProposal> crossover(std::span<const PairedProposal> hb_pairs,
                                      std::span<const PairedProposal> bh_pairs,
                                      double xover_iou = 0.5);

// Number of pairs whose head and body both have IoU > thresh with one person.
std::size_t count_qualified(std::span<const PairedProposal> pairs, std::span<const GtPair> gts,
                            double thresh = 0.5);

}  // namespace darcnn

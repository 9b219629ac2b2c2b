#include "darcnn/crossover.hpp"

#include <stdexcept>

#include "darcnn/geom.hpp"

namespace darcnn {

std::vector<PairLabel> label_pairs(std::span<const PairedProposal> pairs,
                                   std::span<const GtPair> gts, double principal_iou) {
  std::vector<PairLabel> labels(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const PairedProposal& p = pairs[i];
    PairLabel& label = labels[i];
    label.proposal_index = i;

    double best = 0.0;
    std::optional<std::size_t> best_gt;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double o = iou(p.part(p.principal), gts[g].part(p.principal));
      if (o > best) {
        best = o;
        best_gt = g;
      }
    }
    if (!best_gt) {
      continue;
    }
    const GtPair& gt = gts[*best_gt];
    label.head_iou = iou(p.head, gt.head);
    label.body_iou = iou(p.body, gt.body);
    if (best > principal_iou) {
      label.positive = true;
      label.matched_gt = gt.person_id;
    }
  }
  return labels;
}

std::vector<PairedProposal> positive_pairs(std::span<const PairedProposal> pairs,
                                           std::span<const PairLabel> labels) {
  if (pairs.size() != labels.size()) {
    throw std::invalid_argument("positive_pairs: pairs and labels differ in length");
  }
  std::vector<PairedProposal> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (labels[i].positive) {
      out.push_back(pairs[i]);
    }
  }
  return out;
}

std::vector<PairedProposal> crossover(std::span<const PairedProposal> hb_pairs,
                                      std::span<const PairedProposal> bh_pairs,
                                      double xover_iou) {
  std::vector<PairedProposal> out(hb_pairs.begin(), hb_pairs.end());
  for (PairedProposal& recipient : out) {
    double best = 0.0;
    const PairedProposal* donor = nullptr;
    for (const PairedProposal& candidate : bh_pairs) {
      const double o = iou(recipient.body, candidate.body);
      if (o > best) {
        best = o;
        donor = &candidate;
      }
    }
    if (donor != nullptr && best > xover_iou) {
      recipient.body = donor->body;
    }
  }
  return out;
}

std::size_t count_qualified(std::span<const PairedProposal> pairs, std::span<const GtPair> gts,
                            double thresh) {
  std::size_t count = 0;
  for (const PairedProposal& p : pairs) {
    for (const GtPair& gt : gts) {
      if (iou(p.head, gt.head) > thresh && iou(p.body, gt.body) > thresh) {
        ++count;
        break;
      }
    }
  }
  return count;
}

}  // namespace darcnn

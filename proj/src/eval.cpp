#include "darcnn/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "darcnn/error.hpp"

namespace darcnn {

std::size_t MatchResult::true_positives() const {
  return static_cast<std::size_t>(std::count(det_is_tp.begin(), det_is_tp.end(), true));
}

std::size_t MatchResult::false_positives() const { return det_is_tp.size() - true_positives(); }

MatchResult match_detections(std::span<const ScoredBox> dets, std::span<const Box> gts,
                             double iou_thresh) {
  MatchResult result;
  result.det_matched_gt.assign(dets.size(), std::nullopt);
  result.det_is_tp.assign(dets.size(), false);
  result.gt_matched.assign(gts.size(), false);

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });

  for (std::size_t d : order) {
    double best = -1.0;
    std::optional<std::size_t> best_gt;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (result.gt_matched[g]) {
        continue;
      }
      const double o = iou(dets[d].box, gts[g]);
      if (o >= iou_thresh && o > best) {
        best = o;
        best_gt = g;
      }
    }
    if (best_gt) {
      result.gt_matched[*best_gt] = true;
      result.det_matched_gt[d] = best_gt;
      result.det_is_tp[d] = true;
    }
  }
  return result;
}

EvalCurve fppi_mr_curve(std::span<const ImageDetections> dets,
                        std::span<const ImageGroundTruth> gts, double iou_thresh) {
  if (dets.size() != gts.size()) {
    throw std::invalid_argument("fppi_mr_curve: detection and ground-truth image counts differ");
  }

  EvalCurve curve;
  curve.n_images = dets.size();
  for (const auto& g : gts) {
    curve.n_ground_truth += g.size();
  }
  if (curve.n_ground_truth == 0) {
    throw DomainError("fppi_mr_curve: no ground truths");
  }

  struct Scored {
    double score;
    bool tp;
  };
  std::vector<Scored> all;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const MatchResult m = match_detections(dets[i], gts[i], iou_thresh);
    for (std::size_t d = 0; d < dets[i].size(); ++d) {
      all.push_back({dets[i][d].score, m.det_is_tp[d]});
    }
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Scored& a, const Scored& b) { return a.score > b.score; });

  const double n_gt = static_cast<double>(curve.n_ground_truth);
  const double n_img = static_cast<double>(curve.n_images);
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    (all[i].tp ? tp : fp) += 1;
    if (i + 1 < all.size() && all[i + 1].score == all[i].score) {
      continue;
    }
    OperatingPoint pt;
    pt.score_threshold = all[i].score;
    pt.n_true_positive = tp;
    pt.n_false_positive = fp;
    pt.n_ground_truth = curve.n_ground_truth;
    pt.fppi = static_cast<double>(fp) / n_img;
    pt.recall = static_cast<double>(tp) / n_gt;
    pt.miss_rate = 1.0 - pt.recall;
    curve.points.push_back(pt);
  }
  return curve;
}

double log_average_mr(const EvalCurve& curve) {
  double log_sum = 0.0;
  for (double ref : kMrReferenceFppi) {
    double mr = 1.0;
    for (const auto& pt : curve.points) {
      if (pt.fppi <= ref) {
        mr = std::min(mr, pt.miss_rate);
      }
    }
    log_sum += std::log(std::max(mr, kMissRateFloor));
  }
  return std::exp(log_sum / static_cast<double>(kMrReferenceFppi.size()));
}

double ap50(const EvalCurve& curve) {
  // Precision envelope: max precision at recall >= r.
  const auto& pts = curve.points;
  std::vector<double> envelope(pts.size());
  double running = 0.0;
  for (std::size_t i = pts.size(); i-- > 0;) {
    const double precision = static_cast<double>(pts[i].n_true_positive) /
                             static_cast<double>(pts[i].n_true_positive + pts[i].n_false_positive);
    running = std::max(running, precision);
    envelope[i] = running;
  }

  double sum = 0.0;
  std::size_t first = 0;
  for (int k = 0; k <= 100; ++k) {
    const double r = k / 100.0;
    while (first < pts.size() && pts[first].recall < r) {
      ++first;
    }
    if (first < pts.size()) {
      sum += envelope[first];
    }
  }
  return sum / 101.0;
}

double ap50(std::span<const ImageDetections> dets, std::span<const ImageGroundTruth> gts) {
  return ap50(fppi_mr_curve(dets, gts, 0.5));
}

std::vector<double> fppi_at_recall(const EvalCurve& curve, std::span<const double> recalls) {
  std::vector<double> out;
  out.reserve(recalls.size());
  for (double target : recalls) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& pt : curve.points) {
      if (pt.recall >= target) {
        best = std::min(best, pt.fppi);
      }
    }
    out.push_back(best);
  }
  return out;
}

bool is_crowded(std::span<const GtPair> persons) {
  for (std::size_t i = 0; i < persons.size(); ++i) {
    for (std::size_t j = i + 1; j < persons.size(); ++j) {
      if (iou(persons[i].body, persons[j].body) > kCrowdedIou) {
        return true;
      }
    }
  }
  return false;
}

std::vector<Scene> crowded_subset(std::span<const Scene> scenes) {
  std::vector<Scene> out;
  for (const auto& s : scenes) {
    if (is_crowded(s.persons)) {
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace darcnn

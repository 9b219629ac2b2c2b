#include "darcnn/rpn_assign.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "darcnn/error.hpp"
#include "test_util.hpp"

namespace darcnn {
namespace {

GtPair person(Box head, Box body, PersonId id) { return GtPair{head, body, id}; }

TEST(AssignPrincipal, IdenticalAnchorIsPositive) {
  const std::vector<Box> anchors{{0, 0, 10, 10}, {50, 50, 60, 60}};
  const std::vector<GtPair> gts{person({0, 0, 10, 10}, {-5, 0, 15, 40}, 7)};
  const auto out = assign_principal(anchors, gts, Part::head);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].label, AnchorLabel::positive);
  EXPECT_EQ(out[0].matched_gt, PersonId{7});
  EXPECT_EQ(out[1].label, AnchorLabel::negative);
  EXPECT_FALSE(out[1].matched_gt.has_value());
}

TEST(AssignPrincipal, HighestIouPersonWins) {
  // IoU 0.75 with A, 0.72 with B.
  const std::vector<Box> anchors{{0, 0, 10, 10}};
  const std::vector<GtPair> gts{person({0, 0, 10, 7.2}, {0, 0, 10, 30}, 2),
                                person({0, 0, 10, 7.5}, {0, 0, 12, 30}, 1)};
  const auto out = assign_principal(anchors, gts, Part::head);
  EXPECT_EQ(out[0].label, AnchorLabel::positive);
  EXPECT_EQ(out[0].matched_gt, PersonId{1});
  const Box body = decode(anchors[0], *out[0].body_target);
  EXPECT_NEAR(body.x2, 12.0, 1e-9);
}

TEST(AssignPrincipal, LowOverlapIsNegative) {
  // The second anchor is the person's best, so the fallback does not touch the first.
  const std::vector<Box> anchors{{0, 0, 10, 10}, {0, 0, 10, 2}};
  const std::vector<GtPair> gts{person({0, 0, 10, 2}, {0, 0, 10, 20}, 0)};
  const auto out = assign_principal(anchors, gts, Part::head);
  EXPECT_EQ(out[0].label, AnchorLabel::negative);
  EXPECT_EQ(out[1].label, AnchorLabel::positive);
}

TEST(AssignPrincipal, MiddleBandIsIgnored) {
  const std::vector<Box> anchors{{0, 0, 10, 10}, {0, 0, 10, 5}};
  const std::vector<GtPair> gts{person({0, 0, 10, 5}, {0, 0, 10, 20}, 0)};
  const auto out = assign_principal(anchors, gts, Part::head);
  EXPECT_EQ(out[0].label, AnchorLabel::ignore);
}

TEST(AssignPrincipal, FallbackPromotesBestAnchor) {
  const std::vector<Box> anchors{{0, 0, 10, 10}, {30, 30, 40, 40}};
  const std::vector<GtPair> gts{person({0, 0, 10, 4}, {0, 0, 10, 20}, 3)};
  const auto with = assign_principal(anchors, gts, Part::head);
  EXPECT_EQ(with[0].label, AnchorLabel::positive);
  EXPECT_EQ(with[0].matched_gt, PersonId{3});
  const auto without = assign_principal(anchors, gts, Part::head, {0.7, 0.3, false});
  EXPECT_EQ(without[0].label, AnchorLabel::ignore);
}

TEST(AssignPrincipal, EmptyGroundTruthGivesAllNegative) {
  const std::vector<Box> anchors{{0, 0, 10, 10}, {5, 5, 9, 9}};
  for (const auto& a : assign_principal(anchors, {}, Part::body)) {
    EXPECT_EQ(a.label, AnchorLabel::negative);
  }
}

TEST(AssignPrincipal, InvalidThresholdsRejected) {
  const std::vector<Box> anchors{{0, 0, 10, 10}};
  EXPECT_THROW(assign_principal(anchors, {}, Part::head, {0.3, 0.7, true}), ConfigError);
  EXPECT_THROW(assign_principal(anchors, {}, Part::head, {1.5, 0.3, true}), ConfigError);
}

TEST(AssignPrincipal, PositiveTargetsDecodeToBothParts) {
  testing::BoxGen gen(21);
  const auto grid = make_anchor_grid({120, 120}, {{8, 16}, {2, 4}, {0.5, 1, 2}});
  const auto anchors = anchor_boxes(grid);
  for (int round = 0; round < 30; ++round) {
    std::vector<GtPair> gts;
    for (int i = 0; i < 4; ++i) {
      const Box body = gen.box(120.0, 10.0, 60.0);
      const double hw = body.width() * 0.35;
      gts.push_back(person({body.x1, body.y1, body.x1 + hw, body.y1 + hw * 1.2}, body, i + 10));
    }
    for (Part principal : {Part::head, Part::body}) {
      for (const auto& a : assign_principal(anchors, gts, principal)) {
        if (a.label != AnchorLabel::positive) {
          EXPECT_FALSE(a.matched_gt.has_value());
          continue;
        }
        ASSERT_TRUE(a.matched_gt && a.head_target && a.body_target);
        const auto& gt = gts[static_cast<std::size_t>(*a.matched_gt - 10)];
        const Box& anchor = anchors[a.anchor_index];
        const Box h = decode(anchor, *a.head_target);
        const Box b = decode(anchor, *a.body_target);
        EXPECT_NEAR(h.x1, gt.head.x1, 1e-9);
        EXPECT_NEAR(h.y2, gt.head.y2, 1e-9);
        EXPECT_NEAR(b.x1, gt.body.x1, 1e-9);
        EXPECT_NEAR(b.y2, gt.body.y2, 1e-9);
        // The matched person is the principal part's best overlap.
        double best = 0.0;
        for (const auto& g : gts) {
          best = std::max(best, iou(anchor, g.part(principal)));
        }
        EXPECT_EQ(iou(anchor, gt.part(principal)), best);
      }
    }
  }
}

TEST(AssignPrincipal, SymmetricWhenHeadsEqualBodies) {
  testing::BoxGen gen(4);
  const auto anchors = anchor_boxes(make_anchor_grid({64, 64}, {{8}, {2, 3}, {0.5, 1, 2}}));
  std::vector<GtPair> gts;
  for (int i = 0; i < 3; ++i) {
    const Box b = gen.box(64.0, 8.0, 30.0);
    gts.push_back(person(b, b, i));
  }
  const auto h = assign_principal(anchors, gts, Part::head);
  const auto b = assign_principal(anchors, gts, Part::body);
  ASSERT_EQ(h.size(), b.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    EXPECT_EQ(h[i].label, b[i].label);
    EXPECT_EQ(h[i].matched_gt, b[i].matched_gt);
  }
}

AnchorAssignment positive(std::size_t index, BoxDelta head, BoxDelta body) {
  return AnchorAssignment{index, AnchorLabel::positive, PersonId{0}, head, body};
}

AnchorAssignment labelled(std::size_t index, AnchorLabel label) {
  return AnchorAssignment{index, label, std::nullopt, std::nullopt, std::nullopt};
}

TEST(RpnLoss, PerfectFitHasNoRegressionAndTinyCls) {
  const BoxDelta th{0.1, -0.2, 0.3, 0.0};
  const BoxDelta tb{-0.5, 0.4, 0.0, 0.2};
  const std::vector<AnchorAssignment> as{positive(0, th, tb), labelled(1, AnchorLabel::negative),
                                         labelled(2, AnchorLabel::ignore)};
  const std::vector<RpnPrediction> ps{{20.0, th, tb}, {-20.0, {}, {}}, {3.0, {1, 1, 1, 1}, {}}};
  const RpnLoss loss = rpn_loss(ps, as);
  EXPECT_EQ(loss.head_reg, 0.0);
  EXPECT_EQ(loss.body_reg, 0.0);
  EXPECT_LT(loss.cls, 1e-8);
  EXPECT_EQ(loss.total, loss.cls + loss.head_reg + loss.body_reg);
}

TEST(RpnLoss, SingleHeadErrorTerm) {
  const std::vector<AnchorAssignment> as{positive(0, {}, {})};
  const std::vector<RpnPrediction> ps{{1.3, {1, 0, 0, 0}, {}}};
  const RpnLoss loss = rpn_loss(ps, as);
  EXPECT_DOUBLE_EQ(loss.head_reg, 0.125);
  EXPECT_EQ(loss.body_reg, 0.0);
  EXPECT_NEAR(loss.cls, std::log1p(std::exp(-1.3)), 1e-15);
  EXPECT_EQ(loss.total, loss.cls + loss.head_reg + loss.body_reg);
}

TEST(RpnLoss, NegativesOnlyHasZeroRegression) {
  const std::vector<AnchorAssignment> as{labelled(0, AnchorLabel::negative)};
  const std::vector<RpnPrediction> ps{{0.0, {5, 5, 5, 5}, {5, 5, 5, 5}}};
  const RpnLoss loss = rpn_loss(ps, as);
  EXPECT_EQ(loss.head_reg, 0.0);
  EXPECT_NEAR(loss.cls, std::log(2.0), 1e-15);
}

TEST(RpnLoss, NothingSampledIsDomainError) {
  const std::vector<AnchorAssignment> as{labelled(0, AnchorLabel::ignore)};
  const std::vector<RpnPrediction> ps{{0.0, {}, {}}};
  EXPECT_THROW(rpn_loss(ps, as), DomainError);
  EXPECT_THROW(rpn_loss_grad(ps, as), DomainError);
  EXPECT_THROW(rpn_loss({}, {}), DomainError);
}

TEST(RpnLoss, MisalignedInputsRejected) {
  const std::vector<AnchorAssignment> as{labelled(0, AnchorLabel::negative)};
  EXPECT_THROW(rpn_loss({}, as), std::invalid_argument);
}

TEST(SmoothL1, PiecewiseDerivative) {
  EXPECT_DOUBLE_EQ(smooth_l1(1.0), 0.5);
  EXPECT_DOUBLE_EQ(smooth_l1(3.0), 2.5);
  EXPECT_DOUBLE_EQ(smooth_l1_grad(0.5), 0.5);
  EXPECT_DOUBLE_EQ(smooth_l1_grad(2.0), 1.0);
  EXPECT_DOUBLE_EQ(smooth_l1_grad(-2.0), -1.0);
  EXPECT_DOUBLE_EQ(smooth_l1_grad(0.0), 0.0);
}

TEST(RpnLossGrad, ZeroRegressionGradientAtExactFit) {
  const BoxDelta th{0.1, -0.2, 0.3, 0.0};
  const std::vector<AnchorAssignment> as{positive(0, th, th), labelled(1, AnchorLabel::negative)};
  const std::vector<RpnPrediction> ps{{0.3, th, th}, {0.1, {2, 2, 2, 2}, {}}};
  const auto g = rpn_loss_grad(ps, as);
  ASSERT_EQ(g.size(), 2u);
  for (const auto& p : g) {
    EXPECT_EQ(p.head_delta, BoxDelta{});
    EXPECT_EQ(p.body_delta, BoxDelta{});
  }
  EXPECT_NE(g[0].logit, 0.0);
}

double* component(RpnPrediction& p, int k) {
  BoxDelta& d = k < 5 ? p.head_delta : p.body_delta;
  switch (k) {
    case 0: return &p.logit;
    case 1: case 5: return &d.dx;
    case 2: case 6: return &d.dy;
    case 3: case 7: return &d.dw;
    default: return &d.dh;
  }
}

TEST(RpnLossGrad, MatchesCentralDifferences) {
  testing::BoxGen gen(99);
  constexpr double h = 1e-4;
  auto target_comp = [](const BoxDelta& d, int k) {
    switch ((k - 1) % 4) {
      case 0: return d.dx;
      case 1: return d.dy;
      case 2: return d.dw;
      default: return d.dh;
    }
  };
  for (int set = 0; set < 100; ++set) {
    const int n = gen.integer(1, 12);
    std::vector<AnchorAssignment> as;
    std::vector<RpnPrediction> ps;
    for (int i = 0; i < n; ++i) {
      const int kind = i == 0 ? 0 : gen.integer(0, 2);
      auto rd = [&] { return BoxDelta{gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1)}; };
      if (kind == 0) {
        as.push_back(positive(std::size_t(i), rd(), rd()));
      } else {
        as.push_back(labelled(std::size_t(i), kind == 1 ? AnchorLabel::negative : AnchorLabel::ignore));
      }
      RpnPrediction p{gen.uniform(-6, 6), rd(), rd()};
      // Keep residuals away from the Smooth-L1 kink at |e| = 1.
      if (kind == 0) {
        for (int k = 1; k < 9; ++k) {
          const BoxDelta& t = k < 5 ? *as.back().head_target : *as.back().body_target;
          double* v = component(p, k);
          while (std::abs(std::abs(*v - target_comp(t, k)) - kSmoothL1Beta) < 1e-3) {
            *v = gen.uniform(-3, 3);
          }
        }
      }
      ps.push_back(p);
    }
    auto grad = rpn_loss_grad(ps, as);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < 9; ++k) {
        auto plus = ps;
        auto minus = ps;
        *component(plus[std::size_t(i)], k) += h;
        *component(minus[std::size_t(i)], k) -= h;
        const double numeric = (rpn_loss(plus, as).total - rpn_loss(minus, as).total) / (2 * h);
        const double analytic = *component(grad[std::size_t(i)], k);
        const double scale = std::max(std::abs(numeric), std::abs(analytic));
        if (scale < 1e-8) {
          EXPECT_LT(std::abs(numeric - analytic), 1e-8);
        } else {
          EXPECT_LT(std::abs(numeric - analytic) / scale, 1e-5) << "set " << set << " anchor " << i << " comp " << k;
        }
      }
    }
  }
}

TEST(EmitProposals, TopOneIsHighestLogit) {
  const std::vector<Box> anchors{{0, 0, 10, 10}, {20, 20, 30, 30}, {40, 40, 50, 50}};
  const std::vector<RpnPrediction> ps{{0.1, {}, {}}, {2.0, {}, {0, 0.5, 0, 0.7}}, {-1.0, {}, {}}};
  const auto out = emit_proposals(ps, anchors, 1, Part::body, {100, 100});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].head, anchors[1]);
  EXPECT_EQ(out[0].principal, Part::body);
  EXPECT_EQ(out[0].source_branch, Branch::body_head);
  EXPECT_NEAR(out[0].score, 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
  EXPECT_GT(out[0].body.height(), 10.0);
}

TEST(EmitProposals, TiesFavourLowerAnchorIndex) {
  const std::vector<Box> anchors{{0, 0, 10, 10}, {20, 20, 30, 30}, {40, 40, 50, 50}};
  const std::vector<RpnPrediction> ps{{0.5, {}, {}}, {1.0, {}, {}}, {1.0, {}, {}}};
  const auto out = emit_proposals(ps, anchors, 3, Part::head, {100, 100});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].head, anchors[1]);
  EXPECT_EQ(out[1].head, anchors[2]);
  EXPECT_EQ(out[2].head, anchors[0]);
}

TEST(EmitProposals, ClipsToImage) {
  const std::vector<Box> anchors{{90, 90, 110, 120}};
  const std::vector<RpnPrediction> ps{{0.0, {}, {}}};
  const auto out = emit_proposals(ps, anchors, 5, Part::head, {100, 100});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].head, (Box{90, 90, 100, 100}));
}

TEST(EmitProposals, ZeroTopKIsConfigError) {
  const std::vector<Box> anchors{{0, 0, 1, 1}};
  const std::vector<RpnPrediction> ps{{0.0, {}, {}}};
  EXPECT_THROW(emit_proposals(ps, anchors, 0, Part::head, {10, 10}), ConfigError);
}

}  // namespace
}  // namespace darcnn

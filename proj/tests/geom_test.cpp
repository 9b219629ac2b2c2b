#include "darcnn/geom.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "darcnn/error.hpp"
#include "test_util.hpp"

namespace darcnn {
namespace {

TEST(Iou, IdenticalBoxes) { EXPECT_EQ(iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0); }

TEST(Iou, DisjointBoxes) { EXPECT_EQ(iou({0, 0, 10, 10}, {20, 20, 30, 30}), 0.0); }

TEST(Iou, HalfShiftedBox) {
  // intersection 50, union 150
  EXPECT_NEAR(iou({0, 0, 10, 10}, {5, 0, 15, 10}), 1.0 / 3.0, 1e-15);
}

TEST(Iou, SharedEdgeIsZero) {
  EXPECT_EQ(iou({0, 0, 10, 10}, {10, 0, 20, 10}), 0.0);
  EXPECT_EQ(iou({0, 0, 10, 10}, {10, 10, 20, 20}), 0.0);
}

TEST(Iou, Properties) {
  testing::BoxGen gen(11);
  for (int i = 0; i < 5000; ++i) {
    const Box a = i % 2 ? gen.grid_box() : gen.box();
    const Box b = i % 2 ? gen.grid_box() : gen.box();
    const double ab = iou(a, b);
    EXPECT_EQ(ab, iou(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_EQ(ab == 1.0, a == b);
    const bool interiors_overlap =
        std::min(a.x2, b.x2) > std::max(a.x1, b.x1) && std::min(a.y2, b.y2) > std::max(a.y1, b.y1);
    EXPECT_EQ(ab > 0.0, interiors_overlap);
  }
}

TEST(Encode, SelfTargetIsZero) {
  const Box b{3, 4, 17, 29};
  EXPECT_EQ(encode(b, b), (BoxDelta{0, 0, 0, 0}));
}

TEST(Encode, ShiftedTarget) {
  const BoxDelta d = encode({0, 0, 10, 10}, {5, 5, 15, 15});
  EXPECT_DOUBLE_EQ(d.dx, 0.5);
  EXPECT_DOUBLE_EQ(d.dy, 0.5);
  EXPECT_DOUBLE_EQ(d.dw, 0.0);
  EXPECT_DOUBLE_EQ(d.dh, 0.0);
}

TEST(Decode, ZeroDeltaIsIdentity) {
  const Box b{3, 4, 17, 29};
  EXPECT_EQ(decode(b, {}), b);
}

TEST(Decode, InverseOfEncodeExample) {
  const Box out = decode({0, 0, 10, 10}, {0.5, 0.5, 0, 0});
  EXPECT_DOUBLE_EQ(out.x1, 5.0);
  EXPECT_DOUBLE_EQ(out.y1, 5.0);
  EXPECT_DOUBLE_EQ(out.x2, 15.0);
  EXPECT_DOUBLE_EQ(out.y2, 15.0);
}

TEST(Decode, HugeNegativeLogScaleIsClamped) {
  const Box out = decode({0, 0, 10, 10}, {0, 0, -50, -50});
  EXPECT_TRUE(out.valid());
  EXPECT_NEAR(out.width(), 10.0 * std::exp(-kDeltaClamp), 1e-12);
  EXPECT_NEAR(out.width(), 10.0 / 62.5, 1e-6);
}

TEST(Decode, NonFiniteDeltaIsDegenerate) {
  EXPECT_THROW(decode({0, 0, 10, 10}, {std::nan(""), 0, 0, 0}), DegenerateBoxError);
}

TEST(Decode, RoundTripProperty) {
  testing::BoxGen gen(5);
  for (int i = 0; i < 1000; ++i) {
    const Box anchor = gen.box(500.0, 4.0, 200.0);
    const Box target = gen.box(500.0, 4.0, 200.0);
    const Box back = decode(anchor, encode(anchor, target));
    EXPECT_NEAR(back.x1, target.x1, 1e-9);
    EXPECT_NEAR(back.y1, target.y1, 1e-9);
    EXPECT_NEAR(back.x2, target.x2, 1e-9);
    EXPECT_NEAR(back.y2, target.y2, 1e-9);

    const BoxDelta d{gen.uniform(-2, 2), gen.uniform(-2, 2), gen.uniform(-3, 3), gen.uniform(-3, 3)};
    const BoxDelta again = encode(anchor, decode(anchor, d));
    EXPECT_NEAR(again.dx, d.dx, 1e-9);
    EXPECT_NEAR(again.dy, d.dy, 1e-9);
    EXPECT_NEAR(again.dw, d.dw, 1e-9);
    EXPECT_NEAR(again.dh, d.dh, 1e-9);
  }
}

TEST(AnchorGrid, SingleCellThreeRatios) {
  const auto anchors = make_anchor_grid({8, 8}, {{8}, {1}, {0.5, 1, 2}});
  ASSERT_EQ(anchors.size(), 3u);
  // area 64: w = sqrt(64 * ratio)
  EXPECT_NEAR(anchors[0].box.width(), 5.656854249492381, 1e-12);
  EXPECT_NEAR(anchors[1].box.width(), 8.0, 1e-12);
  EXPECT_NEAR(anchors[2].box.width(), 11.313708498984761, 1e-12);
  for (const auto& a : anchors) {
    EXPECT_NEAR(a.box.area(), 64.0, 1e-9);
    EXPECT_DOUBLE_EQ(a.box.center_x(), 4.0);
    EXPECT_DOUBLE_EQ(a.box.center_y(), 4.0);
  }
}

TEST(AnchorGrid, CountMatchesClosedForm) {
  const AnchorGridConfig cfg{{8, 16, 32}, {2, 4}, {0.5, 1, 2}};
  for (const ImageSize image : {ImageSize{100, 60}, ImageSize{1000, 800}, ImageSize{33, 7}}) {
    std::size_t expected = 0;
    for (double s : cfg.strides) {
      expected += static_cast<std::size_t>(std::ceil(image.width / s) * std::ceil(image.height / s)) *
                  cfg.scales.size() * cfg.ratios.size();
    }
    EXPECT_EQ(make_anchor_grid(image, cfg).size(), expected);
  }
}

TEST(AnchorGrid, RatiosComeFromConfiguredSet) {
  const auto anchors = make_anchor_grid({64, 48}, {{16}, {1, 2}, {0.5, 1, 2}});
  for (const auto& a : anchors) {
    const double ratio = a.box.width() / a.box.height();
    const double expected = std::vector<double>{0.5, 1, 2}[a.ratio_index];
    EXPECT_NEAR(ratio, expected, 1e-12);
  }
}

TEST(AnchorGrid, EmptyConfigIsAnError) {
  EXPECT_THROW(make_anchor_grid({8, 8}, {{8}, {1}, {}}), ConfigError);
  EXPECT_THROW(make_anchor_grid({8, 8}, {{}, {1}, {1}}), ConfigError);
  EXPECT_THROW(make_anchor_grid({8, 8}, {{8}, {}, {1}}), ConfigError);
  EXPECT_THROW(make_anchor_grid({8, 8}, {{8}, {1}, {-1}}), ConfigError);
}

TEST(Clip, TruncatesToImage) {
  EXPECT_EQ(clip({-5, -5, 50, 20}, {40, 30}), (Box{0, 0, 40, 20}));
}

}  // namespace
}  // namespace darcnn

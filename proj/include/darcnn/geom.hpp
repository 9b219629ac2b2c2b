#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace darcnn {

// Axis-aligned box in continuous pixel coordinates. area = (x2 - x1) * (y2 - y1),
// no +1 correction.
struct Box {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (x1 + x2); }
  double center_y() const { return 0.5 * (y1 + y2); }

  // Finite coordinates and strictly positive extent.
  bool valid() const {
    return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
           std::isfinite(y2) && x1 < x2 && y1 < y2;
  }

  friend bool operator==(const Box&, const Box&) = default;
};

struct ImageSize {
  double width = 0.0;
  double height = 0.0;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

// Regression offsets of a target relative to an anchor: center offsets
// normalized by anchor size, log-ratios of width and height.
struct BoxDelta {
  double dx = 0.0;
  double dy = 0.0;
  double dw = 0.0;
  double dh = 0.0;

  friend bool operator==(const BoxDelta&, const BoxDelta&) = default;
};

struct Anchor {
  Box box;
  int scale_index = 0;
  int ratio_index = 0;
  double stride = 0.0;
  int row = 0;
  int col = 0;
};

// log(1000 / 16): the usual cap on log-size deltas before exponentiation.
inline constexpr double kDeltaClamp = 4.135166556742356;

// Intersection over union. Boxes that only share an edge have IoU 0.
double iou(const Box& a, const Box& b);

BoxDelta encode(const Box& anchor, const Box& target);

// Inverse of encode. dw and dh are clamped to [-clamp, clamp] before exponentiation.
// Throws DegenerateBoxError if the decoded box is not a valid box (non-finite delta).
Box decode(const Box& anchor, const BoxDelta& delta, double clamp = kDeltaClamp);

// Truncates a box to [0, w] x [0, h]. The result may be degenerate.
Box clip(const Box& box, const ImageSize& image);

struct AnchorGridConfig {
  std::vector<double> strides;  // one pyramid level per stride
  std::vector<double> scales;   // anchor side at ratio 1, in units of the stride
  std::vector<double> ratios;   // width / height
};

// One anchor per (level, cell, scale, ratio), centered on the cell center.
// Count per level is ceil(w / stride) * ceil(h / stride) * |scales| * |ratios|.
// Throws ConfigError on empty or non-positive config values.
std::vector<Anchor> make_anchor_grid(const ImageSize& image, const AnchorGridConfig& config);

std::vector<Box> anchor_boxes(std::span<const Anchor> anchors);

}  // namespace darcnn

#include "darcnn/geom.hpp"

#include <algorithm>
#include <string>

#include "darcnn/error.hpp"

namespace darcnn {

double iou(const Box& a, const Box& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (iw <= 0.0 || ih <= 0.0) {
    return 0.0;
  }
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return std::min(1.0, inter / uni);
}

BoxDelta encode(const Box& anchor, const Box& target) {
  const double wa = anchor.width();
  const double ha = anchor.height();
  return BoxDelta{
      (target.center_x() - anchor.center_x()) / wa,
      (target.center_y() - anchor.center_y()) / ha,
      std::log(target.width() / wa),
      std::log(target.height() / ha),
  };
}

Box decode(const Box& anchor, const BoxDelta& delta, double clamp) {
  const double wa = anchor.width();
  const double ha = anchor.height();
  const double cx = anchor.center_x() + delta.dx * wa;
  const double cy = anchor.center_y() + delta.dy * ha;
  const double w = wa * std::exp(std::clamp(delta.dw, -clamp, clamp));
  const double h = ha * std::exp(std::clamp(delta.dh, -clamp, clamp));
  const Box out{cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h};
  if (!out.valid()) {
    throw DegenerateBoxError("decoded box has non-positive or non-finite size");
  }
  return out;
}

Box clip(const Box& box, const ImageSize& image) {
  return Box{
      std::clamp(box.x1, 0.0, image.width),
      std::clamp(box.y1, 0.0, image.height),
      std::clamp(box.x2, 0.0, image.width),
      std::clamp(box.y2, 0.0, image.height),
  };
}

namespace {

void require_positive(const std::vector<double>& values, const char* name) {
  if (values.empty()) {
    throw ConfigError(std::string("anchor grid: empty ") + name);
  }
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("anchor grid: non-positive value in ") + name);
    }
  }
}

}  // namespace

std::vector<Anchor> make_anchor_grid(const ImageSize& image, const AnchorGridConfig& config) {
  require_positive(config.strides, "strides");
  require_positive(config.scales, "scales");
  require_positive(config.ratios, "ratios");
  if (!(image.width > 0.0) || !(image.height > 0.0)) {
    throw ConfigError("anchor grid: image size must be positive");
  }

  std::vector<Anchor> anchors;
  for (double stride : config.strides) {
    const int rows = static_cast<int>(std::ceil(image.height / stride));
    const int cols = static_cast<int>(std::ceil(image.width / stride));
    anchors.reserve(anchors.size() + static_cast<std::size_t>(rows) * cols *
                                         config.scales.size() * config.ratios.size());
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double cx = (c + 0.5) * stride;
        const double cy = (r + 0.5) * stride;
        for (std::size_t si = 0; si < config.scales.size(); ++si) {
          const double side = config.scales[si] * stride;
          const double area = side * side;
          for (std::size_t ri = 0; ri < config.ratios.size(); ++ri) {
            const double w = std::sqrt(area * config.ratios[ri]);
            const double h = area / w;
            anchors.push_back(Anchor{
                Box{cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h},
                static_cast<int>(si), static_cast<int>(ri), stride, r, c});
          }
        }
      }
    }
  }
  return anchors;
}

std::vector<Box> anchor_boxes(std::span<const Anchor> anchors) {
  std::vector<Box> boxes;
  boxes.reserve(anchors.size());
  for (const auto& a : anchors) {
    boxes.push_back(a.box);
  }
  return boxes;
}

}  // namespace darcnn

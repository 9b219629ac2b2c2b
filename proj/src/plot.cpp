#include "darcnn/plot.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "darcnn/error.hpp"

namespace darcnn {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 60.0;
constexpr double kMinLog = -2.0;  // both axes start at 1e-2

constexpr std::array<const char*, 6> kColors = {"#1f77b4", "#d62728", "#2ca02c",
                                                "#9467bd", "#ff7f0e", "#17becf"};
constexpr std::array<const char*, 3> kDashes = {"", "6,3", "2,2"};

std::string fixed(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

double to_px_x(double fppi) {
  const double l = std::log10(std::clamp(fppi, 1e-2, 1.0));
  return kLeft + (l - kMinLog) / -kMinLog * (kWidth - kLeft - kRight);
}

double to_px_y(double mr) {
  const double l = std::log10(std::clamp(mr, 1e-2, 1.0));
  return kTop + (0.0 - l) / -kMinLog * (kHeight - kTop - kBottom);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_mr_fppi_svg(std::span<const CurveSeries> series) {
  if (series.empty()) {
    throw DomainError("plot: no curves");
  }
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth) + "\" height=\"" +
         fixed(kHeight) + "\" viewBox=\"0 0 " + fixed(kWidth) + " " + fixed(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const double x0 = to_px_x(1e-2);
  const double x1 = to_px_x(1.0);
  const double y0 = to_px_y(1e-2);
  const double y1 = to_px_y(1.0);
  svg += "<g id=\"axes\" stroke=\"black\" fill=\"none\">\n";
  svg += "<rect x=\"" + fixed(x0) + "\" y=\"" + fixed(y1) + "\" width=\"" + fixed(x1 - x0) +
         "\" height=\"" + fixed(y0 - y1) + "\"/>\n";
  svg += "</g>\n";

  svg += "<g id=\"ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double f : {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0}) {
    const double x = to_px_x(f);
    const double y = to_px_y(f);
    svg += "<line x1=\"" + fixed(x) + "\" y1=\"" + fixed(y0) + "\" x2=\"" + fixed(x) +
           "\" y2=\"" + fixed(y1) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<line x1=\"" + fixed(x0) + "\" y1=\"" + fixed(y) + "\" x2=\"" + fixed(x1) +
           "\" y2=\"" + fixed(y) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fixed(x) + "\" y=\"" + fixed(y0 + 16.0) +
           "\" text-anchor=\"middle\">" + io::format_double(f) + "</text>\n";
    svg += "<text x=\"" + fixed(x0 - 6.0) + "\" y=\"" + fixed(y + 4.0) +
           "\" text-anchor=\"end\">" + io::format_double(f) + "</text>\n";
  }
  svg += "<text x=\"" + fixed(0.5 * (x0 + x1)) + "\" y=\"" + fixed(kHeight - 15.0) +
         "\" text-anchor=\"middle\">false positives per image</text>\n";
  svg += "<text x=\"15\" y=\"" + fixed(0.5 * (y0 + y1)) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " + fixed(0.5 * (y0 + y1)) +
         ")\">miss rate</text>\n";
  svg += "</g>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const CurveSeries& s = series[i];
    const char* color = kColors[i % kColors.size()];
    const char* dash = kDashes[(i / kColors.size()) % kDashes.size()];
    svg += "<polyline class=\"series\" fill=\"none\" stroke-width=\"2\" stroke=\"";
    svg += color;
    svg += "\"";
    if (*dash != '\0') {
      svg += " stroke-dasharray=\"";
      svg += dash;
      svg += "\"";
    }
    svg += " points=\"";
    for (std::size_t k = 0; k < s.samples.size(); ++k) {
      if (k > 0) {
        svg += ' ';
      }
      svg += fixed(to_px_x(s.samples[k].fppi)) + "," + fixed(to_px_y(s.samples[k].miss_rate));
    }
    svg += "\"/>\n";

    const double ly = y1 + 16.0 + 18.0 * static_cast<double>(i);
    const double lx = x1 - 170.0;
    svg += "<line x1=\"" + fixed(lx) + "\" y1=\"" + fixed(ly) + "\" x2=\"" + fixed(lx + 24.0) +
           "\" y2=\"" + fixed(ly) + "\" stroke-width=\"2\" stroke=\"" + color + "\"";
    if (*dash != '\0') {
      svg += std::string(" stroke-dasharray=\"") + dash + "\"";
    }
    svg += "/>\n";
    svg += "<text x=\"" + fixed(lx + 30.0) + "\" y=\"" + fixed(ly + 4.0) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + escape(s.name) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace darcnn

#pragma once

#include <span>
#include <string>
#include <vector>

#include "darcnn/io.hpp"

namespace darcnn {

struct CurveSeries {
  std::string name;
  std::vector<io::CurveSample> samples;
};

// Standalone SVG of miss rate against FPPI on log-log axes. The x axis spans
// [1e-2, 1e0] and the y axis [1e-2, 1]; samples are clamped into that window.
// Series are told apart by colour and dash pattern and listed in a legend.
std::string render_mr_fppi_svg(std::span<const CurveSeries> series);

}  // namespace darcnn

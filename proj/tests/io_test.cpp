#include "darcnn/io.hpp"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "darcnn/error.hpp"
#include "darcnn/plot.hpp"

namespace darcnn {
namespace {

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(1.0), "1");
  EXPECT_EQ(std::stod(io::format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(ParseJson, ReportsLineAndColumn) {
  try {
    io::parse_json("{\n  \"a\": 1,\n  \"b\": ]\n}", "bad.json");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("bad.json"), std::string::npos);
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column"), std::string::npos) << msg;
  }
}

TEST(BoxJson, RoundTripAndValidation) {
  const Box b{1.5, 2, 3, 4.25};
  EXPECT_EQ(io::box_from_json(io::box_to_json(b), "t"), b);
  EXPECT_THROW(io::box_from_json(io::Json::array({1, 2, 3}), "t"), ParseError);
  EXPECT_THROW(io::box_from_json(io::Json::array({3, 2, 1, 4}), "t"), ParseError);
  EXPECT_THROW(io::box_from_json(io::Json::array({"a", 2, 3, 4}), "t"), ParseError);
}

TEST(SceneJson, RoundTrip) {
  Scene s{"00007", {640, 480}, {{{1, 2, 3, 4}, {0, 0, 10, 30}, 3}, {{5, 5, 7, 7}, {4, 4, 12, 40}, 9}}};
  EXPECT_EQ(io::scene_from_json(io::scene_to_json(s), "t"), s);
}

TEST(ConfigJson, RoundTripAndUnknownKeys) {
  SceneConfig cfg;
  cfg.seed = 77;
  cfg.crowd_intensity = 0.25;
  const SceneConfig back = io::scene_config_from_json(io::scene_config_to_json(cfg));
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.crowd_intensity, 0.25);
  EXPECT_THROW(io::scene_config_from_json(io::Json{{"n_person", 3}}), Error);
  EXPECT_THROW(io::scene_config_from_json(io::Json{{"crowd_intensity", 3.0}}), ConfigError);
  DetectorNoise noise;
  noise.dup_score_mean = -0.25;
  EXPECT_EQ(io::detector_noise_from_json(io::detector_noise_to_json(noise)).dup_score_mean, -0.25);
  EXPECT_THROW(io::detector_noise_from_json(io::Json{{"jitter", 1}}), Error);
}

TEST(DetectionJson, RoundTrip) {
  io::DetectionFile f;
  f.config = io::Json{{"lambda", 0.8}};
  f.images.push_back({"a", {{{{0, 0, 2, 2}, {0, 0, 2, 6}, 0.25, 0.75}, 0, 0.65}, {{{1, 1, 3, 3}, {1, 1, 3, 7}, 0.5, 0.5}, {}, {}}}});
  f.images.push_back({"b", {}});
  const io::Json j = io::detection_file_to_json(f);
  const io::DetectionFile back = io::detection_file_from_json(j);
  EXPECT_EQ(io::dump_json(io::detection_file_to_json(back)), io::dump_json(j));
  ASSERT_EQ(back.images.size(), 2u);
  EXPECT_EQ(back.images[0].detections[0].kept_rank, std::size_t{0});
  EXPECT_FALSE(back.images[0].detections[1].joint_score.has_value());
}

TEST(CurveCsv, RoundTrip) {
  EvalCurve c;
  c.points.push_back({0.9, 1, 0, 2, 0.0, 0.5, 0.5});
  c.points.push_back({0.4, 2, 1, 2, 0.5, 0.0, 1.0});
  const std::string csv = io::curve_to_csv(c);
  EXPECT_EQ(csv, "threshold,fppi,miss_rate,recall\n0.9,0,0.5,0.5\n0.4,0.5,0,1\n");
  const auto samples = io::curve_from_csv(csv, "c.csv");
  ASSERT_EQ(samples.size(), 2u);
  EXPECT_EQ(samples[1].fppi, 0.5);
  EXPECT_EQ(samples[0].miss_rate, 0.5);
}

TEST(CurveCsv, NonNumericCellNamesRow) {
  try {
    io::curve_from_csv("threshold,fppi,miss_rate,recall\n0.9,0,0.5,0.5\n0.4,abc,0,1\n", "c.csv");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
}

TEST(Summary, UnreachableRecallIsMarked) {
  const std::vector<double> recalls{0.2, 0.8};
  const std::vector<double> fppi{0.125, std::numeric_limits<double>::infinity()};
  const io::Json j = io::eval_summary_to_json(0.5, 0.75, recalls, fppi);
  EXPECT_EQ(j.at("fppi_at_recall").at("0.2"), 0.125);
  EXPECT_EQ(j.at("fppi_at_recall").at("0.8"), "unreachable");
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

TEST(Plot, OnePolylinePerSeries) {
  const CurveSeries a{"joint", {{0.01, 0.9}, {0.1, 0.6}, {1.0, 0.4}}};
  const CurveSeries b{"body", {{0.02, 0.95}, {0.5, 0.7}}};
  const std::string one = render_mr_fppi_svg(std::vector<CurveSeries>{a});
  EXPECT_EQ(count(one, "<polyline class=\"series\""), 1u);
  EXPECT_NE(one.find("<svg"), std::string::npos);
  EXPECT_NE(one.find(">0.01<"), std::string::npos);
  const std::string two = render_mr_fppi_svg(std::vector<CurveSeries>{a, b});
  EXPECT_EQ(count(two, "<polyline class=\"series\""), 2u);
  EXPECT_NE(two.find(">joint<"), std::string::npos);
  EXPECT_NE(two.find(">body<"), std::string::npos);
  EXPECT_THROW(render_mr_fppi_svg({}), DomainError);
}

}  // namespace
}  // namespace darcnn

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "darcnn/eval.hpp"
#include "darcnn/rpn_assign.hpp"
#include "darcnn/simscene.hpp"
#include "darcnn/types.hpp"

namespace darcnn::io {

using Json = nlohmann::json;

// Shortest round-trip decimal form, '.' separator, locale independent.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
// Creates parent directories. Throws Error if the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Throws ParseError carrying the source name and the parser's line/column.
Json parse_json(const std::string& text, const std::string& source);
Json load_json(const std::filesystem::path& path);
// Pretty-printed with a trailing newline.
std::string dump_json(const Json& j);

// Box <-> [x1, y1, x2, y2]
Json box_to_json(const Box& b);
Box box_from_json(const Json& j, const std::string& where);

// {"image": {"id", "w", "h"}, "persons": [{"id", "head", "body"}]}
Json scene_to_json(const Scene& scene);
Scene scene_from_json(const Json& j, const std::string& where);

// A scene file, or a manifest {"scenes": [{"image_id", "file"}]} whose file
// entries are resolved relative to the manifest's directory.
std::vector<Scene> load_scenes(const std::filesystem::path& path);

SceneConfig scene_config_from_json(const Json& j);
Json scene_config_to_json(const SceneConfig& cfg);
DetectorNoise detector_noise_from_json(const Json& j);
Json detector_noise_to_json(const DetectorNoise& noise);

struct DetectionRecord {
  DetectionPair pair;
  std::optional<std::size_t> kept_rank;
  std::optional<double> joint_score;
};

struct DetectionImage {
  std::string image_id;
  std::vector<DetectionRecord> detections;
};

// {"config": {...}?, "images": [{"image_id", "detections": [{"head", "body",
// "s_h", "s_b", "kept_rank"?, "joint_score"?}]}]}
struct DetectionFile {
  std::optional<Json> config;
  std::vector<DetectionImage> images;
};

Json detection_file_to_json(const DetectionFile& file);
DetectionFile detection_file_from_json(const Json& j);
DetectionFile load_detection_file(const std::filesystem::path& path);

// {"image_id", "principal", "assignments": [{"anchor_index", "label",
// "person_id", "head_target", "body_target"}]}; deltas as [dx, dy, dw, dh].
Json assignments_to_json(const std::string& image_id, Part principal,
                         std::span<const AnchorAssignment> assignments, bool positives_only);

// "threshold,fppi,miss_rate,recall" rows, newline-terminated.
std::string curve_to_csv(const EvalCurve& curve);

struct CurveSample {
  double fppi = 0.0;
  double miss_rate = 0.0;
};

// Reads a curve CSV back. Throws ParseError naming the offending row.
std::vector<CurveSample> curve_from_csv(const std::string& text, const std::string& source);

// {"mr2", "ap50", "fppi_at_recall": {"0.2": fppi | "unreachable", ...}}
Json eval_summary_to_json(double mr2, double ap, std::span<const double> recalls,
                          std::span<const double> fppi);

}  // namespace darcnn::io

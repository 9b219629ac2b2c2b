#include "darcnn/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "darcnn/error.hpp"

namespace darcnn {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SceneConfig, image_w, image_h, n_persons,
                                                crowd_intensity, body_w_min, body_w_max,
                                                body_aspect_min, body_aspect_max, head_ratio_min,
                                                head_ratio_max, seed)

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(
    DetectorNoise, head_jitter, body_jitter, head_miss_prob, body_miss_prob, fp_per_image,
    fp_duplicate_fraction, head_tp_score_mean, head_tp_score_std, head_fp_score_mean,
    head_fp_score_std, body_tp_score_mean, body_tp_score_std, body_fp_score_mean,
    body_fp_score_std, occlusion_body_score_penalty, dup_score_mean, principal_jitter, attached_jitter, proposals_per_person,
    background_proposals, seed)

}  // namespace darcnn

namespace darcnn::io {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw Error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << text;
  out.flush();
  if (!out) {
    throw Error("write failed for " + path.string());
  }
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
}

Json load_json(const std::filesystem::path& path) {
  return parse_json(read_text_file(path), path.string());
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json box_to_json(const Box& b) { return Json::array({b.x1, b.y1, b.x2, b.y2}); }

Box box_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) {
    throw ParseError(where + ": box must be an array [x1, y1, x2, y2]");
  }
  for (const auto& v : j) {
    if (!v.is_number()) {
      throw ParseError(where + ": box coordinates must be numbers");
    }
  }
  const Box b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (!b.valid()) {
    throw ParseError(where + ": box needs x1 < x2 and y1 < y2");
  }
  return b;
}

namespace {

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

double require_number(const Json& j, const char* key, const std::string& where) {
  const Json& v = require(j, key, where);
  if (!v.is_number()) {
    throw ParseError(where + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

std::string id_string(const Json& v, const std::string& where) {
  if (v.is_string()) {
    return v.get<std::string>();
  }
  if (v.is_number_integer()) {
    return std::to_string(v.get<std::int64_t>());
  }
  throw ParseError(where + ": image id must be a string or integer");
}

// Rejects keys the default-constructed config does not have.
template <typename Config>
Config config_from_json(const Json& j, const char* what) {
  if (!j.is_object()) {
    throw ParseError(std::string(what) + ": expected a JSON object");
  }
  const Json known = Config{};
  for (const auto& item : j.items()) {
    if (!known.contains(item.key())) {
      throw ParseError(std::string(what) + ": unknown field '" + item.key() + "'");
    }
  }
  try {
    Config cfg = j.get<Config>();
    cfg.validate();
    return cfg;
  } catch (const Json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

Json scene_to_json(const Scene& scene) {
  Json persons = Json::array();
  for (const auto& p : scene.persons) {
    persons.push_back({{"id", p.person_id}, {"head", box_to_json(p.head)},
                       {"body", box_to_json(p.body)}});
  }
  return {{"image", {{"id", scene.image_id}, {"w", scene.image.width}, {"h", scene.image.height}}},
          {"persons", std::move(persons)}};
}

Scene scene_from_json(const Json& j, const std::string& where) {
  Scene scene;
  const Json& image = require(j, "image", where);
  scene.image_id = image.contains("id") ? id_string(image.at("id"), where) : "";
  scene.image.width = require_number(image, "w", where + ".image");
  scene.image.height = require_number(image, "h", where + ".image");
  const Json& persons = require(j, "persons", where);
  if (!persons.is_array()) {
    throw ParseError(where + ": 'persons' must be an array");
  }
  for (std::size_t i = 0; i < persons.size(); ++i) {
    const std::string at = where + ".persons[" + std::to_string(i) + "]";
    const Json& p = persons[i];
    const Json& id = require(p, "id", at);
    if (!id.is_number_integer()) {
      throw ParseError(at + ": 'id' must be an integer");
    }
    scene.persons.push_back(GtPair{box_from_json(require(p, "head", at), at + ".head"),
                                   box_from_json(require(p, "body", at), at + ".body"),
                                   id.get<PersonId>()});
  }
  return scene;
}

std::vector<Scene> load_scenes(const std::filesystem::path& path) {
  const Json j = load_json(path);
  if (!j.contains("scenes")) {
    return {scene_from_json(j, path.string())};
  }
  const Json& entries = j.at("scenes");
  if (!entries.is_array()) {
    throw ParseError(path.string() + ": 'scenes' must be an array");
  }
  std::vector<Scene> scenes;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string at = path.string() + ".scenes[" + std::to_string(i) + "]";
    const Json& file = require(entries[i], "file", at);
    if (!file.is_string()) {
      throw ParseError(at + ": 'file' must be a string");
    }
    const std::filesystem::path scene_path = path.parent_path() / file.get<std::string>();
    scenes.push_back(scene_from_json(load_json(scene_path), scene_path.string()));
  }
  return scenes;
}

SceneConfig scene_config_from_json(const Json& j) {
  return config_from_json<SceneConfig>(j, "scene config");
}

Json scene_config_to_json(const SceneConfig& cfg) { return cfg; }

DetectorNoise detector_noise_from_json(const Json& j) {
  return config_from_json<DetectorNoise>(j, "detector noise");
}

Json detector_noise_to_json(const DetectorNoise& noise) { return noise; }

Json detection_file_to_json(const DetectionFile& file) {
  Json images = Json::array();
  for (const auto& image : file.images) {
    Json dets = Json::array();
    for (const auto& rec : image.detections) {
      Json d = {{"head", box_to_json(rec.pair.head)},
                {"body", box_to_json(rec.pair.body)},
                {"s_h", rec.pair.head_score},
                {"s_b", rec.pair.body_score}};
      if (rec.kept_rank) {
        d["kept_rank"] = *rec.kept_rank;
      }
      if (rec.joint_score) {
        d["joint_score"] = *rec.joint_score;
      }
      dets.push_back(std::move(d));
    }
    images.push_back({{"image_id", image.image_id}, {"detections", std::move(dets)}});
  }
  Json out = Json::object();
  if (file.config) {
    out["config"] = *file.config;
  }
  out["images"] = std::move(images);
  return out;
}

namespace {

double require_score(const Json& j, const char* key, const std::string& where) {
  const double s = require_number(j, key, where);
  if (!(s >= 0.0 && s <= 1.0)) {
    throw ParseError(where + ": '" + key + "' must lie in [0, 1]");
  }
  return s;
}

}  // namespace

DetectionFile detection_file_from_json(const Json& j) {
  DetectionFile file;
  if (j.is_object() && j.contains("config")) {
    file.config = j.at("config");
  }
  const Json& images = require(j, "images", "detections");
  if (!images.is_array()) {
    throw ParseError("detections: 'images' must be an array");
  }
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string at = "detections.images[" + std::to_string(i) + "]";
    DetectionImage image;
    image.image_id = id_string(require(images[i], "image_id", at), at);
    const Json& dets = require(images[i], "detections", at);
    if (!dets.is_array()) {
      throw ParseError(at + ": 'detections' must be an array");
    }
    for (std::size_t k = 0; k < dets.size(); ++k) {
      const std::string dat = at + ".detections[" + std::to_string(k) + "]";
      const Json& d = dets[k];
      DetectionRecord rec;
      rec.pair.head = box_from_json(require(d, "head", dat), dat + ".head");
      rec.pair.body = box_from_json(require(d, "body", dat), dat + ".body");
      rec.pair.head_score = require_score(d, "s_h", dat);
      rec.pair.body_score = require_score(d, "s_b", dat);
      if (d.contains("kept_rank")) {
        if (!d.at("kept_rank").is_number_unsigned()) {
          throw ParseError(dat + ": 'kept_rank' must be a non-negative integer");
        }
        rec.kept_rank = d.at("kept_rank").get<std::size_t>();
      }
      if (d.contains("joint_score")) {
        rec.joint_score = require_score(d, "joint_score", dat);
      }
      image.detections.push_back(rec);
    }
    file.images.push_back(std::move(image));
  }
  return file;
}

DetectionFile load_detection_file(const std::filesystem::path& path) {
  try {
    return detection_file_from_json(load_json(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

namespace {

Json delta_to_json(const BoxDelta& d) { return Json::array({d.dx, d.dy, d.dw, d.dh}); }

}  // namespace

Json assignments_to_json(const std::string& image_id, Part principal,
                         std::span<const AnchorAssignment> assignments, bool positives_only) {
  Json records = Json::array();
  for (const auto& a : assignments) {
    if (positives_only && a.label != AnchorLabel::positive) {
      continue;
    }
    Json r = {{"anchor_index", a.anchor_index}, {"label", std::string(to_string(a.label))}};
    r["person_id"] = a.matched_gt ? Json(*a.matched_gt) : Json(nullptr);
    r["head_target"] = a.head_target ? delta_to_json(*a.head_target) : Json(nullptr);
    r["body_target"] = a.body_target ? delta_to_json(*a.body_target) : Json(nullptr);
    records.push_back(std::move(r));
  }
  return {{"image_id", image_id},
          {"principal", std::string(to_string(principal))},
          {"assignments", std::move(records)}};
}

std::string curve_to_csv(const EvalCurve& curve) {
  std::string out = "threshold,fppi,miss_rate,recall\n";
  for (const auto& pt : curve.points) {
    out += format_double(pt.score_threshold);
    out += ',';
    out += format_double(pt.fppi);
    out += ',';
    out += format_double(pt.miss_rate);
    out += ',';
    out += format_double(pt.recall);
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    cells.emplace_back();
  }
  return cells;
}

double parse_cell(const std::string& cell, const std::string& source, std::size_t row,
                  const std::string& column) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParseError(source + ": row " + std::to_string(row) + ": non-numeric " + column +
                     " cell '" + cell + "'");
  }
  return v;
}

}  // namespace

std::vector<CurveSample> curve_from_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.empty()) {
    throw ParseError(source + ": empty CSV");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  const std::vector<std::string> header = split_csv_line(line);
  std::optional<std::size_t> fppi_col;
  std::optional<std::size_t> mr_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "fppi") fppi_col = c;
    if (header[c] == "miss_rate") mr_col = c;
  }
  if (!fppi_col || !mr_col) {
    throw ParseError(source + ": header must contain 'fppi' and 'miss_rate' columns");
  }

  std::vector<CurveSample> samples;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ParseError(source + ": row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " cells, got " +
                       std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      parse_cell(cells[c], source, row, header[c]);
    }
    samples.push_back(CurveSample{parse_cell(cells[*fppi_col], source, row, "fppi"),
                                  parse_cell(cells[*mr_col], source, row, "miss_rate")});
  }
  if (samples.empty()) {
    throw ParseError(source + ": no data rows");
  }
  return samples;
}

Json eval_summary_to_json(double mr2, double ap, std::span<const double> recalls,
                          std::span<const double> fppi) {
  Json at_recall = Json::object();
  for (std::size_t i = 0; i < recalls.size() && i < fppi.size(); ++i) {
    at_recall[format_double(recalls[i])] =
        std::isfinite(fppi[i]) ? Json(fppi[i]) : Json("unreachable");
  }
  return {{"mr2", mr2}, {"ap50", ap}, {"fppi_at_recall", std::move(at_recall)}};
}

}  // namespace darcnn::io

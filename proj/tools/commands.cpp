#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "darcnn/error.hpp"
#include "darcnn/eval.hpp"
#include "darcnn/geom.hpp"
#include "darcnn/io.hpp"
#include "darcnn/pipeline.hpp"
#include "darcnn/plot.hpp"
#include "darcnn/rpn_assign.hpp"
#include "darcnn/simscene.hpp"

namespace darcnn::cli {

namespace {

using io::Json;

std::string scene_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%05zu", index);
  return buf;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) {
      out += ", ";
    }
    out += s;
  }
  return out;
}

}  // namespace

NmsVariant parse_variant(const std::string& name) {
  if (name == "original-body") return NmsVariant::original_body;
  if (name == "original-head") return NmsVariant::original_head;
  if (name == "joint") return NmsVariant::joint;
  throw ConfigError("unknown nms variant '" + name +
                    "' (expected original-body, original-head or joint)");
}

void cmd_gen(const GenOptions& opts) {
  if (opts.n_scenes < 0) {
    throw ConfigError("gen: --n-scenes must be >= 0");
  }
  SceneConfig cfg = io::scene_config_from_json(io::load_json(opts.config));
  const std::uint64_t seed = opts.seed.value_or(cfg.seed);
  cfg.seed = seed;

  Json entries = Json::array();
  for (int i = 0; i < opts.n_scenes; ++i) {
    const std::string id = scene_id(static_cast<std::size_t>(i));
    const Scene scene =
        generate_scene(scene_config_for(cfg, seed, static_cast<std::size_t>(i)), id);
    const std::string file = "scene_" + id + ".json";
    io::write_text_file(opts.out / file, io::dump_json(io::scene_to_json(scene)));
    entries.push_back({{"image_id", id}, {"file", file}});
  }
  const Json manifest = {{"seed", seed},
                         {"n_scenes", opts.n_scenes},
                         {"config", io::scene_config_to_json(cfg)},
                         {"scenes", std::move(entries)}};
  io::write_text_file(opts.out / "manifest.json", io::dump_json(manifest));
}

void cmd_simulate(const SimulateOptions& opts) {
  const std::vector<Scene> scenes = io::load_scenes(opts.scenes);
  const DetectorNoise noise = io::detector_noise_from_json(io::load_json(opts.noise));
  const std::uint64_t seed = opts.seed.value_or(noise.seed);

  io::DetectionFile file;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    io::DetectionImage image;
    image.image_id = scenes[i].image_id;
    for (const auto& pair : simulate_detections(scenes[i], noise_for(noise, seed, i))) {
      image.detections.push_back(io::DetectionRecord{pair, std::nullopt, std::nullopt});
    }
    file.images.push_back(std::move(image));
  }
  io::write_text_file(opts.out, io::dump_json(io::detection_file_to_json(file)));
}

void cmd_assign(const AssignOptions& opts) {
  const std::vector<Scene> scenes = io::load_scenes(opts.scenes);
  const AnchorGridConfig grid{opts.strides, opts.scales, opts.ratios};
  const AssignConfig assign{opts.pos_iou, opts.neg_iou, true};

  Json images = Json::array();
  for (const Scene& scene : scenes) {
    const auto anchors = make_anchor_grid(scene.image, grid);
    const auto boxes = anchor_boxes(anchors);
    const auto result = assign_principal(boxes, scene.persons, opts.principal, assign);
    Json record = io::assignments_to_json(scene.image_id, opts.principal, result, !opts.all);
    record["anchor_count"] = anchors.size();
    images.push_back(std::move(record));
  }
  const Json out = {{"config",
                     {{"strides", opts.strides},
                      {"scales", opts.scales},
                      {"ratios", opts.ratios},
                      {"pos_iou", opts.pos_iou},
                      {"neg_iou", opts.neg_iou}}},
                    {"images", std::move(images)}};
  io::write_text_file(opts.out, io::dump_json(out));
}

void cmd_crossover_stats(const CrossoverStatsOptions& opts) {
  const std::vector<Scene> scenes = io::load_scenes(opts.scenes);
  const DetectorNoise noise = io::detector_noise_from_json(io::load_json(opts.noise));
  const std::uint64_t seed = opts.seed.value_or(noise.seed);

  std::string csv = "image_id,n_positive_hb,n_qualified_before,n_qualified_after\n";
  double sum_pos = 0.0;
  double sum_before = 0.0;
  double sum_after = 0.0;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const CrossoverCounts c = crossover_counts(scenes[i], noise_for(noise, seed, i));
    csv += scenes[i].image_id + "," + std::to_string(c.n_positive_hb) + "," +
           std::to_string(c.qualified_before) + "," + std::to_string(c.qualified_after) + "\n";
    sum_pos += static_cast<double>(c.n_positive_hb);
    sum_before += static_cast<double>(c.qualified_before);
    sum_after += static_cast<double>(c.qualified_after);
  }
  if (!scenes.empty()) {
    const double n = static_cast<double>(scenes.size());
    csv += "mean," + io::format_double(sum_pos / n) + "," + io::format_double(sum_before / n) +
           "," + io::format_double(sum_after / n) + "\n";
  }
  io::write_text_file(opts.out, csv);
}

void cmd_nms(const NmsOptions& opts) {
  opts.config.validate();
  const io::DetectionFile input = io::load_detection_file(opts.detections);

  // Original NMS is joint NMS with the other part's threshold at 1 and all
  // score weight on its own part; the header records that effective config.
  NmsConfig effective = opts.config;
  if (opts.variant == NmsVariant::original_body) {
    effective = NmsConfig{1.0, opts.config.omega_b, 1.0};
  } else if (opts.variant == NmsVariant::original_head) {
    effective = NmsConfig{opts.config.omega_h, 1.0, 0.0};
  }

  io::DetectionFile out;
  out.config = Json{{"omega_h", effective.omega_h},
                    {"omega_b", effective.omega_b},
                    {"lambda", effective.lambda}};
  for (const auto& image : input.images) {
    std::vector<DetectionPair> pairs;
    for (const auto& rec : image.detections) {
      pairs.push_back(rec.pair);
    }
    std::vector<std::size_t> kept;
    if (opts.variant == NmsVariant::joint) {
      kept = joint_nms(pairs, effective);
    } else {
      const Part part = opts.variant == NmsVariant::original_body ? Part::body : Part::head;
      std::vector<Box> boxes;
      std::vector<double> scores;
      for (const auto& p : pairs) {
        boxes.push_back(part == Part::body ? p.body : p.head);
        scores.push_back(part == Part::body ? p.body_score : p.head_score);
      }
      kept = original_nms(boxes, scores,
                          part == Part::body ? effective.omega_b : effective.omega_h);
    }

    io::DetectionImage filtered;
    filtered.image_id = image.image_id;
    for (std::size_t rank = 0; rank < kept.size(); ++rank) {
      const DetectionPair& p = pairs[kept[rank]];
      filtered.detections.push_back(
          io::DetectionRecord{p, rank, joint_score(p, effective.lambda)});
    }
    out.images.push_back(std::move(filtered));
  }
  io::write_text_file(opts.out, io::dump_json(io::detection_file_to_json(out)));
}

void cmd_eval(const EvalOptions& opts) {
  const io::DetectionFile dets = io::load_detection_file(opts.detections);
  const std::vector<Scene> scenes = io::load_scenes(opts.scenes);

  std::map<std::string, const io::DetectionImage*> by_id;
  std::vector<std::string> duplicates;
  for (const auto& image : dets.images) {
    if (!by_id.emplace(image.image_id, &image).second) {
      duplicates.push_back(image.image_id);
    }
  }
  if (!duplicates.empty()) {
    throw Error("eval: duplicate image ids in detections: " + join(duplicates));
  }
  std::vector<std::string> only_scenes;
  std::set<std::string> scene_ids;
  for (const auto& s : scenes) {
    scene_ids.insert(s.image_id);
    if (!by_id.contains(s.image_id)) {
      only_scenes.push_back(s.image_id);
    }
  }
  std::vector<std::string> only_dets;
  for (const auto& [id, image] : by_id) {
    if (!scene_ids.contains(id)) {
      only_dets.push_back(id);
    }
  }
  if (!only_scenes.empty() || !only_dets.empty()) {
    throw Error("eval: image id mismatch; only in detections: [" + join(only_dets) +
                "]; only in scenes: [" + join(only_scenes) + "]");
  }

  std::vector<ImageDetections> per_image_dets;
  std::vector<ImageGroundTruth> per_image_gts;
  for (const auto& scene : scenes) {
    ImageDetections image_dets;
    for (const auto& rec : by_id.at(scene.image_id)->detections) {
      double score = 0.0;
      switch (opts.score) {
        case ScoreSource::automatic:
          score = rec.joint_score.value_or(opts.part == Part::body ? rec.pair.body_score
                                                                   : rec.pair.head_score);
          break;
        case ScoreSource::joint:
          if (!rec.joint_score) {
            throw Error("eval: --score joint needs detections carrying joint_score");
          }
          score = *rec.joint_score;
          break;
        case ScoreSource::head:
          score = rec.pair.head_score;
          break;
        case ScoreSource::body:
          score = rec.pair.body_score;
          break;
      }
      image_dets.push_back(
          ScoredBox{opts.part == Part::body ? rec.pair.body : rec.pair.head, score});
    }
    per_image_dets.push_back(std::move(image_dets));
    ImageGroundTruth gts;
    for (const auto& p : scene.persons) {
      gts.push_back(p.part(opts.part));
    }
    per_image_gts.push_back(std::move(gts));
  }

  const EvalCurve curve = fppi_mr_curve(per_image_dets, per_image_gts);
  const std::vector<double> at_recall = fppi_at_recall(curve);
  const Json summary =
      io::eval_summary_to_json(log_average_mr(curve), ap50(curve), kDefaultRecalls, at_recall);
  io::write_text_file(opts.out / "summary.json", io::dump_json(summary));
  io::write_text_file(opts.out / "curve.csv", io::curve_to_csv(curve));
}

void cmd_plot(const PlotOptions& opts) {
  if (opts.curves.empty()) {
    throw ConfigError("plot: no curve files given");
  }
  std::vector<CurveSeries> series;
  for (const auto& path : opts.curves) {
    series.push_back(CurveSeries{path.stem().string(),
                                 io::curve_from_csv(io::read_text_file(path), path.string())});
  }
  io::write_text_file(opts.out, render_mr_fppi_svg(series));
}

namespace {

std::string require_string(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ParseError(std::string("experiment: missing string field '") + key + "'");
  }
  return j.at(key).get<std::string>();
}

double number_or(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) {
    return fallback;
  }
  if (!j.at(key).is_number()) {
    throw ParseError(std::string("experiment: field '") + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

}  // namespace

void cmd_experiment(const ExperimentOptions& opts) {
  const Json spec = io::load_json(opts.spec);
  static const std::set<std::string> kKnown = {"scene_config", "noise_config", "n_scenes", "seed",
                                               "nms", "crossover", "output_dir"};
  for (const auto& item : spec.items()) {
    if (!kKnown.contains(item.key())) {
      throw ParseError("experiment: unknown field '" + item.key() + "'");
    }
  }
  const fs::path scene_config = require_string(spec, "scene_config");
  const fs::path noise_config = require_string(spec, "noise_config");
  for (const auto& p : {scene_config, noise_config}) {
    if (!fs::exists(p)) {
      throw Error("experiment: referenced file does not exist: " + p.string());
    }
  }
  const fs::path out = opts.out.value_or(fs::path(require_string(spec, "output_dir")));
  const int n_scenes = static_cast<int>(number_or(spec, "n_scenes", 10.0));
  std::uint64_t seed = 0;
  if (opts.seed) {
    seed = *opts.seed;
  } else if (spec.contains("seed") && spec.at("seed").is_number_unsigned()) {
    seed = spec.at("seed").get<std::uint64_t>();
  } else {
    throw ParseError("experiment: needs a non-negative integer 'seed' or --seed");
  }
  const Json nms = spec.value("nms", Json::object());
  NmsOptions nms_opts;
  nms_opts.variant = parse_variant(nms.value("variant", std::string("joint")));
  nms_opts.config = NmsConfig{number_or(nms, "omega_h", 0.5), number_or(nms, "omega_b", 0.5),
                              number_or(nms, "lambda", 0.8)};
  const bool with_crossover = spec.value("crossover", false);

  cmd_gen(GenOptions{scene_config, n_scenes, seed, out / "scenes"});
  const fs::path manifest = out / "scenes" / "manifest.json";
  cmd_simulate(SimulateOptions{manifest, noise_config, seed, out / "detections.json"});
  nms_opts.detections = out / "detections.json";
  nms_opts.out = out / "nms.json";
  cmd_nms(nms_opts);
  cmd_eval(EvalOptions{out / "nms.json", manifest, Part::body, ScoreSource::automatic,
                       out / "eval"});
  if (with_crossover) {
    cmd_crossover_stats(
        CrossoverStatsOptions{manifest, noise_config, seed, out / "crossover_stats.csv"});
  }
  cmd_plot(PlotOptions{{out / "eval" / "curve.csv"}, out / "curve.svg"});
}

}  // namespace darcnn::cli

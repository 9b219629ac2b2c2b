#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "darcnn/jnms.hpp"
#include "darcnn/types.hpp"

namespace darcnn::cli {

namespace fs = std::filesystem;

struct GenOptions {
  fs::path config;
  int n_scenes = 1;
  std::optional<std::uint64_t> seed;
  fs::path out;
};

struct SimulateOptions {
  fs::path scenes;
  fs::path noise;
  std::optional<std::uint64_t> seed;
  fs::path out;
};

struct AssignOptions {
  fs::path scenes;
  Part principal = Part::head;
  std::vector<double> strides = {8.0, 16.0, 32.0};
  std::vector<double> scales = {2.0, 4.0};
  std::vector<double> ratios = {0.5, 1.0, 2.0};
  double pos_iou = 0.7;
  double neg_iou = 0.3;
  bool all = false;
  fs::path out;
};

struct CrossoverStatsOptions {
  fs::path scenes;
  fs::path noise;
  std::optional<std::uint64_t> seed;
  fs::path out;
};

enum class NmsVariant { original_body, original_head, joint };

NmsVariant parse_variant(const std::string& name);

struct NmsOptions {
  fs::path detections;
  NmsVariant variant = NmsVariant::joint;
  NmsConfig config;
  fs::path out;
};

enum class ScoreSource { automatic, joint, head, body };

struct EvalOptions {
  fs::path detections;
  fs::path scenes;
  Part part = Part::body;
  ScoreSource score = ScoreSource::automatic;
  fs::path out;  // directory receiving summary.json and curve.csv
};

struct PlotOptions {
  std::vector<fs::path> curves;
  fs::path out;
};

struct ExperimentOptions {
  fs::path spec;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> out;
};

void cmd_gen(const GenOptions& opts);
void cmd_simulate(const SimulateOptions& opts);
void cmd_assign(const AssignOptions& opts);
void cmd_crossover_stats(const CrossoverStatsOptions& opts);
void cmd_nms(const NmsOptions& opts);
void cmd_eval(const EvalOptions& opts);
void cmd_plot(const PlotOptions& opts);
void cmd_experiment(const ExperimentOptions& opts);

}  // namespace darcnn::cli

#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "darcnn/error.hpp"

namespace {

using namespace darcnn;
using namespace darcnn::cli;

const std::map<std::string, Part> kParts = {{"head", Part::head}, {"body", Part::body}};
const std::map<std::string, ScoreSource> kScores = {{"auto", ScoreSource::automatic},
                                                    {"joint", ScoreSource::joint},
                                                    {"head", ScoreSource::head},
                                                    {"body", ScoreSource::body}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paired head/body detection post-processing: anchor assignment, proposal "
               "crossover, Joint NMS and crowded-scene evaluation."};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate synthetic crowded scenes and a manifest");
  gen_cmd->add_option("--config", gen.config, "Scene config JSON")->required()->check(CLI::ExistingFile);
  gen_cmd->add_option("--n-scenes", gen.n_scenes, "Number of scenes to write")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Base seed (defaults to the config's seed)");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate noisy paired detections for scenes");
  sim_cmd->add_option("--scenes", sim.scenes, "Scene file or manifest")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--noise", sim.noise, "Detector noise config JSON")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--seed", sim.seed, "Base seed (defaults to the noise config's seed)");
  sim_cmd->add_option("--out", sim.out, "Output detections JSON")->required();

  AssignOptions assign;
  auto* assign_cmd = app.add_subcommand("assign", "Dump double-anchor label assignments");
  assign_cmd->add_option("--scenes", assign.scenes, "Scene file or manifest")->required()->check(CLI::ExistingFile);
  std::string principal = "head";
  assign_cmd->add_option("--principal", principal, "Principal part: head or body")
      ->check(CLI::IsMember({"head", "body"}))
      ->capture_default_str();
  assign_cmd->add_option("--strides", assign.strides, "Anchor strides, one per level")
      ->delimiter(',')->capture_default_str();
  assign_cmd->add_option("--scales", assign.scales, "Anchor side at ratio 1, in strides")
      ->delimiter(',')->capture_default_str();
  assign_cmd->add_option("--ratios", assign.ratios, "Anchor width/height ratios")
      ->delimiter(',')->capture_default_str();
  assign_cmd->add_option("--pos-iou", assign.pos_iou, "Positive IoU threshold (strict >)")->capture_default_str();
  assign_cmd->add_option("--neg-iou", assign.neg_iou, "Negative IoU threshold (strict <)")->capture_default_str();
  assign_cmd->add_flag("--all", assign.all, "Dump every anchor instead of positives only");
  assign_cmd->add_option("--out", assign.out, "Output JSON")->required();

  CrossoverStatsOptions xs;
  auto* xs_cmd = app.add_subcommand("crossover-stats",
                                    "Qualified proposal pairs before and after crossover, as CSV");
  xs_cmd->add_option("--scenes", xs.scenes, "Scene file or manifest")->required()->check(CLI::ExistingFile);
  xs_cmd->add_option("--noise", xs.noise, "Detector noise config JSON")->required()->check(CLI::ExistingFile);
  xs_cmd->add_option("--seed", xs.seed, "Base seed (defaults to the noise config's seed)");
  xs_cmd->add_option("--out", xs.out, "Output CSV")->required();

  NmsOptions nms;
  std::string variant = "joint";
  auto* nms_cmd = app.add_subcommand("nms", "Suppress duplicate detections per image");
  nms_cmd->add_option("--detections", nms.detections, "Detections JSON")->required()->check(CLI::ExistingFile);
  nms_cmd->add_option("--variant", variant, "original-body, original-head or joint")->capture_default_str();
  nms_cmd->add_option("--omega-h", nms.config.omega_h, "Head IoU threshold")->capture_default_str();
  nms_cmd->add_option("--omega-b", nms.config.omega_b, "Body IoU threshold")->capture_default_str();
  nms_cmd->add_option("--lambda", nms.config.lambda, "Weight of the body score")->capture_default_str();
  nms_cmd->add_option("--out", nms.out, "Output detections JSON")->required();

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "MR-2, AP50 and FPPI-at-recall of a detection file");
  eval_cmd->add_option("--detections", ev.detections, "Detections JSON")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--scenes", ev.scenes, "Scene file or manifest")->required()->check(CLI::ExistingFile);
  std::string part = "body";
  std::string score = "auto";
  eval_cmd->add_option("--part", part, "Part to evaluate: head or body")
      ->check(CLI::IsMember({"head", "body"}))
      ->capture_default_str();
  eval_cmd->add_option("--score", score,
                       "Ranking score: auto (joint_score if present, else the part's own), "
                       "joint, head or body")
      ->check(CLI::IsMember({"auto", "joint", "head", "body"}))
      ->capture_default_str();
  eval_cmd->add_option("--out", ev.out, "Output directory for summary.json and curve.csv")->required();

  PlotOptions plot;
  auto* plot_cmd = app.add_subcommand("plot", "Plot miss rate vs FPPI curves to SVG");
  plot_cmd->add_option("curves", plot.curves, "Curve CSV files written by eval")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--out", plot.out, "Output SVG")->required();

  ExperimentOptions exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Run gen, simulate, nms, eval and plot end to end");
  exp_cmd->add_option("--spec", exp.spec, "Experiment spec JSON")->required()->check(CLI::ExistingFile);
  exp_cmd->add_option("--seed", exp.seed, "Override the experiment file's seed");
  exp_cmd->add_option("--out", exp.out, "Override the experiment file's output_dir");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) {
      cmd_gen(gen);
    } else if (*sim_cmd) {
      cmd_simulate(sim);
    } else if (*assign_cmd) {
      assign.principal = kParts.at(principal);
      cmd_assign(assign);
    } else if (*xs_cmd) {
      cmd_crossover_stats(xs);
    } else if (*nms_cmd) {
      nms.variant = parse_variant(variant);
      cmd_nms(nms);
    } else if (*eval_cmd) {
      ev.part = kParts.at(part);
      ev.score = kScores.at(score);
      cmd_eval(ev);
    } else if (*plot_cmd) {
      cmd_plot(plot);
    } else if (*exp_cmd) {
      cmd_experiment(exp);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

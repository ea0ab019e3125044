// lanekit command line: fit / match / transform / eval / compare-models /
// synth over line-delimited lane frame files.
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lanekit/commands.hpp"

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string mode = "openlane";
  std::string input, output;
  std::uint64_t seed = 0;
};

lanekit::ToolConfig resolve_config(const GlobalArgs& args) {
  lanekit::ToolConfig cfg = lanekit::ToolConfig::preset(args.mode);
  if (!args.config_path.empty()) cfg = lanekit::load_config(args.config_path, cfg);
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* cmd, GlobalArgs& args, bool needs_input, bool needs_output) {
  cmd->add_option("--config", args.config_path, "JSON config file (see docs/format.md)");
  cmd->add_option("--mode", args.mode, "dataset preset: openlane or argoverse2")
      ->check(CLI::IsMember({"openlane", "argoverse2"}));
  auto* in = cmd->add_option("--input", args.input, "input frame file");
  auto* out = cmd->add_option("--output", args.output, "output report file");
  if (needs_input) in->required();
  if (needs_output) out->required();
  cmd->add_option("--seed", args.seed, "random seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint Bézier/key-point lane modeling, matching and evaluation"};
  app.require_subcommand(1);

  GlobalArgs args;
  std::string kind = "mixed";
  int frames = 10;
  double noise = 0.0;
  std::string gt_path;
  std::string curves_csv;
  bool apply_range = false;

  auto* synth = app.add_subcommand("synth", "generate synthetic lane frames");
  add_common(synth, args, false, true);
  synth->add_option("--kind", kind,
                    "straight|u_shape|closed_loop|y_shape|lateral|mixed");
  synth->add_option("--frames", frames, "number of frames")->check(CLI::PositiveNumber);
  synth->add_option("--noise", noise, "coordinate noise sigma in meters")
      ->check(CLI::NonNegativeNumber);

  auto* fit = app.add_subcommand("fit", "fit lanes to key points + Bézier controls");
  add_common(fit, args, true, true);

  auto* match = app.add_subcommand("match", "assign predictions to ground truth");
  add_common(match, args, true, true);
  match->add_option("--gt", gt_path, "ground-truth frame file")->required();

  auto* transform = app.add_subcommand("transform", "surround-view to front-view lanes");
  add_common(transform, args, true, true);
  transform->add_flag("--apply-range", apply_range, "apply the 3D perception-range filter");

  auto* eval = app.add_subcommand("eval", "evaluate predictions against ground truth");
  add_common(eval, args, true, true);
  eval->add_option("--gt", gt_path, "ground-truth frame file")->required();

  auto* compare = app.add_subcommand("compare-models", "modeling-error comparison");
  add_common(compare, args, true, true);
  compare->add_option("--curves", curves_csv, "optional CSV dump of sampled curves");

  CLI11_PARSE(app, argc, argv);

  try {
    const lanekit::ToolConfig cfg = resolve_config(args);
    if (synth->parsed()) {
      lanekit::cmd_synth(cfg, args.output, kind, frames, noise, args.seed);
    } else if (fit->parsed()) {
      lanekit::cmd_fit(cfg, args.input, args.output);
    } else if (match->parsed()) {
      lanekit::cmd_match(cfg, args.input, gt_path, args.output);
    } else if (transform->parsed()) {
      lanekit::cmd_transform(cfg, args.input, args.output, apply_range);
    } else if (eval->parsed()) {
      lanekit::cmd_eval(cfg, args.input, gt_path, args.output);
    } else if (compare->parsed()) {
      lanekit::cmd_compare_models(cfg, args.input, args.output, curves_csv);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

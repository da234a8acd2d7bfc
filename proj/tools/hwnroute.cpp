#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hwnroute/error.hpp"
#include "hwnroute/experiment.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::string checkpoint;
  std::optional<int> seeds;
  std::string out;
  int threads = 1;
  bool resume = false;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool config_required) {
  auto* c = cmd->add_option("--config", a.config, "Scenario JSON file")->check(CLI::ExistingFile);
  if (config_required) c->required();
  cmd->add_option("--checkpoint", a.checkpoint, "Network checkpoint path");
  cmd->add_option("--seeds", a.seeds, "Number of topology seeds")->check(CLI::PositiveNumber);
  cmd->add_option("--out", a.out, "Output directory (default: $HWNROUTE_OUT_DIR or ./results)");
  cmd->add_option("--threads", a.threads, "Worker threads for evaluation")->check(CLI::PositiveNumber);
}

hwnroute::RunOptions to_options(const CommonArgs& a) {
  hwnroute::RunOptions o;
  o.out_dir = a.out.empty() ? hwnroute::default_out_dir() : std::filesystem::path(a.out);
  if (!a.checkpoint.empty()) o.checkpoint = a.checkpoint;
  o.seeds = a.seeds;
  o.threads = a.threads;
  o.resume = a.resume;
  o.log = &std::cerr;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-flow routing simulator for heterogeneous wireless networks"};
  app.require_subcommand(1);

  CommonArgs train_args, eval_args, sweep_args, mobility_args;
  auto* train = app.add_subcommand("train", "Train the routing agent and write a checkpoint");
  add_common(train, train_args, true);
  train->add_flag("--resume", train_args.resume, "Continue from --checkpoint and its .train state file");
  auto* eval = app.add_subcommand("eval", "Evaluate schemes on held-out topologies");
  add_common(eval, eval_args, true);
  auto* sweep = app.add_subcommand("sweep", "Evaluate schemes over one config axis");
  add_common(sweep, sweep_args, true);
  std::string axis;
  std::vector<int> values;
  sweep->add_option("--axis", axis, "subbands | relay_count | resource_count | flow_count");
  sweep->add_option("--values", values, "Axis values (overrides the config)");
  auto* mobility = app.add_subcommand("mobility", "Per-second sum rate under node mobility");
  add_common(mobility, mobility_args, true);
  std::string model;
  mobility->add_option("--model", model, "random_walk | random_waypoint (overrides the config)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      return hwnroute::cmd_train(hwnroute::load_scenario(train_args.config), to_options(train_args));
    }
    if (eval->parsed()) {
      return hwnroute::cmd_eval(hwnroute::load_scenario(eval_args.config), to_options(eval_args));
    }
    if (sweep->parsed()) {
      auto config = hwnroute::load_scenario(sweep_args.config);
      if (!axis.empty()) {
        const auto a = hwnroute::parse_sweep_axis(axis);
        if (!a) throw hwnroute::Error("unknown sweep axis " + axis);
        config.sweep.axis = *a;
      }
      if (!values.empty()) config.sweep.values = values;
      return hwnroute::cmd_sweep(config, to_options(sweep_args));
    }
    if (mobility->parsed()) {
      auto config = hwnroute::load_scenario(mobility_args.config);
      if (!model.empty()) {
        const auto m = hwnroute::parse_mobility_model(model);
        if (!m) throw hwnroute::Error("unknown mobility model " + model);
        config.mobility.model = *m;
      }
      return hwnroute::cmd_mobility(config, to_options(mobility_args));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

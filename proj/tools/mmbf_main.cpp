// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: train agents, evaluate checkpoints greedily, or
// run the agent-free random/exhaustive baseline.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mmbf/config.hpp"
#include "mmbf/harness.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int episodes = 0;
  bool locations = false;
  std::string reward_mode;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* episodes_opt = nullptr;
  CLI::Option* locations_opt = nullptr;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON run configuration file");
  cmd->add_option("--out", f.out_dir, "output directory");
  f.seed_opt = cmd->add_option("--seed", f.seed, "master seed override");
  f.episodes_opt = cmd->add_option("--episodes", f.episodes, "episode count override");
  f.locations_opt = cmd->add_option(
      "--locations", f.locations,
      "include UE locations in the agent state (true/false)");
  cmd->add_option("--reward-mode", f.reward_mode,
                  "reward definition: 'text' (beam/omni) or 'algorithm'")
      ->check(CLI::IsMember({"text", "algorithm"}));
}

mmbf::RunConfig resolve_config(const CommonFlags& f, bool episodes_are_eval) {
  mmbf::RunConfig cfg = f.config_path.empty()
                            ? mmbf::RunConfig{}
                            : mmbf::RunConfig::load(f.config_path);
  if (f.seed_opt->count() > 0) cfg.master_seed = f.seed;
  if (f.episodes_opt->count() > 0) {
    if (episodes_are_eval)
      cfg.eval_episodes = f.episodes;
    else
      cfg.episodes = f.episodes;
  }
  if (f.locations_opt->count() > 0) cfg.include_locations = f.locations;
  if (!f.reward_mode.empty())
    cfg.reward_mode = mmbf::reward_mode_from_string(f.reward_mode);
  if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale mmWave multi-BS beam selection simulator with "
               "distributed per-BS double-DQN agents"};
  app.require_subcommand(1);

  CommonFlags train_flags, eval_flags, baseline_flags;
  std::string ckpt_dir;

  CLI::App* train_cmd =
      app.add_subcommand("train", "train one DDQN agent per base station");
  add_common_flags(train_cmd, train_flags);

  CLI::App* eval_cmd =
      app.add_subcommand("eval", "greedy evaluation of saved checkpoints");
  add_common_flags(eval_cmd, eval_flags);
  eval_cmd->add_option("--ckpt", ckpt_dir, "directory holding agent_<j>.ckpt")
      ->required();

  CLI::App* baseline_cmd = app.add_subcommand(
      "baseline", "random-policy run with the exhaustive-search reference");
  add_common_flags(baseline_cmd, baseline_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      const mmbf::RunConfig cfg = resolve_config(train_flags, false);
      mmbf::train(cfg, cfg.out_dir);
      std::cout << "training done: " << cfg.episodes << " episodes, "
                << cfg.n_bs << " agents -> " << cfg.out_dir << "\n";
    } else if (eval_cmd->parsed()) {
      const mmbf::RunConfig cfg = resolve_config(eval_flags, true);
      const mmbf::EvalSummary s = mmbf::evaluate(cfg, ckpt_dir, cfg.out_dir);
      std::cout << s.to_json().dump(2) << "\n";
    } else {
      const mmbf::RunConfig cfg = resolve_config(baseline_flags, false);
      mmbf::baseline(cfg, cfg.out_dir);
      std::cout << "baseline done: " << cfg.episodes << " episodes -> "
                << cfg.out_dir << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

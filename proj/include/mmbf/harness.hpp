// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmbf/config.hpp"

namespace mmbf {

/// Greedy-policy evaluation aggregates. Means and standard deviations are
/// taken over per-episode mean sum-rates.
struct EvalSummary {
  int episodes = 0;
  int k_train = 0;
  int k_test = 0;
  double mean_sum_ddqn = 0.0;
  double std_sum_ddqn = 0.0;
  double mean_sum_exhaustive = 0.0;
  double std_sum_exhaustive = 0.0;
  double mean_sum_random = 0.0;
  double std_sum_random = 0.0;
  double ratio_ddqn_exhaustive = 0.0;

  nlohmann::json to_json() const;
  static EvalSummary from_json(const nlohmann::json& j);
};

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, int bs_id);

/// Runs the full distributed multi-agent training loop: per episode,
/// mobility, link realization, omni association, per-agent action and
/// learning, plus exhaustive and random counterfactuals on the same
/// channel realization. Writes metrics.csv and agent_<j>.ckpt files
/// (every checkpoint_period episodes and at termination) under out_dir.
void train(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Greedy (epsilon = 0) evaluation of saved checkpoints over fresh
/// episodes. cfg.n_ue is the test-time UE count; when it differs from the
/// checkpoints' training K, states are zero-padded (fewer UEs) or built
/// from a random per-episode subset (more UEs). Writes metrics.csv and
/// summary.json under out_dir.
EvalSummary evaluate(const RunConfig& cfg, const std::filesystem::path& ckpt_dir,
                     const std::filesystem::path& out_dir);

/// Agent-free run: the applied policy is uniform random codeword choice;
/// exhaustive search is still evaluated per step. Writes metrics.csv.
void baseline(const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace mmbf

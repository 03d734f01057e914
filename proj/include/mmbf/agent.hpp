// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mmbf/environment.hpp"
#include "mmbf/mlp.hpp"
#include "mmbf/replay.hpp"
#include "mmbf/rng.hpp"

namespace mmbf {

/// Omni rates are divided by this many bits/s/Hz and clipped to [0, 1]
/// before entering the state vector.
inline constexpr double kStateRateScale = 20.0;

enum class RewardMode {
  BeamOverOmni,  // R^j / R^oj
  OmniOverBeam   // inverted ratio, kept for comparison runs
};

/// Ratio reward; defined as 0 when the denominator is 0 (no associated UEs).
double reward_ratio(double r_beam, double r_omni, RewardMode mode);

/// State vector of one BS: the T_m omni-rate history of every UE slot in
/// fixed slot order (zeroed when the slot's UE is missing or associated
/// elsewhere), then optionally each slot's scaled (x, y). slot_ids maps
/// state slots to UE ids; -1 marks an empty (zero-padded) slot.
Eigen::VectorXd build_state(const std::vector<UserEquipment>& ues,
                            const std::vector<int>& serving_bs, int bs_id,
                            bool include_locations, double position_scale,
                            std::span<const int> slot_ids);

/// Argmax with ties to the lowest index.
int greedy_action(const Eigen::VectorXd& q);

/// Epsilon-greedy: uniform random with probability epsilon, else greedy.
int select_action(const Eigen::VectorXd& q, double epsilon, Rng& rng);

/// Double-DQN target kernel: r when terminal, else
/// r + gamma * q_target[argmax q_online].
double ddqn_target(double reward, bool terminal,
                   const Eigen::VectorXd& q_next_online,
                   const Eigen::VectorXd& q_next_target, double gamma);

/// Targets for a minibatch; the online network selects the bootstrap
/// action, the target network evaluates it.
std::vector<double> ddqn_targets(const std::vector<Experience>& batch,
                                 const MlpParams& online,
                                 const MlpParams& target, double gamma);

/// Mean squared error over the batch on the taken actions only, with the
/// matching parameter gradients. Targets are constants here; no gradient
/// flows through the network that produced them.
std::pair<double, MlpParams> loss_and_gradients(
    const MlpParams& params, const std::vector<Experience>& batch,
    const std::vector<double>& targets);

struct AgentConfig {
  int bs_id = 0;
  int n_ue_slots = 1;  // K the network was sized for
  int memory_length = 8;
  int n_actions = 8;
  bool include_locations = false;
  double gamma = 0.95;
  double learning_rate = 1e-4;
  int batch_size = 32;
  std::size_t replay_capacity = 10000;
  int target_sync_period = 200;  // gradient steps between target syncs
  double position_scale = 50.0;

  int input_dim() const {
    return n_ue_slots * memory_length + (include_locations ? 2 * n_ue_slots : 0);
  }
  int hidden1() const { return 12 * n_ue_slots; }
  int hidden2() const { return 8 * n_ue_slots; }
  void validate() const;
};

/// Per-BS learner: online and target networks, Adam state, replay buffer
/// and exploration rate.
class AgentBrain {
 public:
  AgentBrain(AgentConfig cfg, Rng& init_rng);

  const AgentConfig& config() const { return cfg_; }
  const MlpParams& online() const { return online_; }
  const MlpParams& target() const { return target_; }
  const AdamState& adam() const { return adam_; }
  ReplayBuffer& replay() { return replay_; }
  const ReplayBuffer& replay() const { return replay_; }

  double epsilon() const { return epsilon_; }
  void set_epsilon(double eps);
  long grad_steps() const { return grad_steps_; }

  Eigen::VectorXd q_values(const Eigen::VectorXd& state) const;
  int act(const Eigen::VectorXd& state, Rng& explore_rng) const;

  void store(Experience e) { replay_.push(std::move(e)); }

  /// One minibatch gradient step; returns the loss, or nullopt when the
  /// buffer is underfilled. Syncs the target network every
  /// target_sync_period gradient steps.
  std::optional<double> learn(Rng& sample_rng);

  void sync_target() { target_ = online_; }

  nlohmann::json to_json() const;
  static AgentBrain from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static AgentBrain load(const std::filesystem::path& path);

 private:
  AgentBrain(AgentConfig cfg, MlpParams online, MlpParams target,
             AdamState adam, double epsilon, long grad_steps);

  AgentConfig cfg_;
  MlpParams online_;
  MlpParams target_;
  AdamState adam_;
  ReplayBuffer replay_;
  double epsilon_ = 0.9;
  long grad_steps_ = 0;
};

}  // namespace mmbf

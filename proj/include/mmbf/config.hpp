// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmbf/agent.hpp"
#include "mmbf/channel.hpp"
#include "mmbf/environment.hpp"

namespace mmbf {

/// Full run description. Defaults reproduce the reference desk-scale
/// scenario: two BSs on intersecting 100 m streets, 16-antenna ULAs,
/// single-antenna UEs, an 8-entry codebook and batch 32.
struct RunConfig {
  int n_bs = 2;
  std::vector<Eigen::Vector2d> bs_positions = {{5.0, -5.0}, {-25.0, -5.0}};
  int n_ue = 4;
  int n_tx_antennas = 16;
  int n_rx_antennas = 1;
  double antenna_spacing = 0.5;  // d / lambda
  double tx_power_dbm = 30.0;
  double noise_power_dbm = -84.0;
  double bs_broadside_deg = 0.0;  // world bearing all BS arrays face
  bool averaged_pilots = false;   // pilot measurement averages small-scale fading
  int codebook_size = 8;
  std::string codebook_design = "angle";  // "angle" or "sin" quantization
  int memory_length = 8;  // T_m
  int step_cap = 60;      // hard per-episode step bound
  int episodes = 2000;
  double gamma = 0.75;
  std::vector<double> learning_rates = {1e-3};  // cycled over BS ids
  double epsilon_max = 0.9;
  double epsilon_min = 0.1;
  double epsilon_decay_fraction = 0.8;  // share of episodes spent decaying
  int batch_size = 32;
  std::size_t replay_capacity = 100000;
  int target_sync_period = 100;
  bool include_locations = true;
  RewardMode reward_mode = RewardMode::BeamOverOmni;
  std::uint64_t master_seed = 1;
  int checkpoint_period = 100;  // episodes between checkpoint writes
  int eval_episodes = 100;
  std::string out_dir = "out";
  PropagationParams propagation;
  StreetWorld street;

  void validate() const;  // throws std::invalid_argument naming the field

  double tx_power_w() const;
  double noise_power_w() const;
  double learning_rate_for(int bs_id) const;

  /// Linear decay from epsilon_max to epsilon_min over the first
  /// epsilon_decay_fraction of episodes, then flat.
  double epsilon_for_episode(int episode) const;

  std::vector<BaseStation> make_base_stations() const;
  ArrayGeometry ue_array() const;
  Codebook make_codebook() const;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

double dbm_to_watts(double dbm);

std::string to_string(RewardMode mode);
RewardMode reward_mode_from_string(const std::string& s);

}  // namespace mmbf

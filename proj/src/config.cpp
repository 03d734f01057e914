// SPDX-License-Identifier: Apache-2.0
#include "mmbf/config.hpp"

#include <cmath>
#include <numbers>
#include <fstream>
#include <set>
#include <stdexcept>

namespace mmbf {

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw std::invalid_argument("config field '" + field + "' " + why);
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

}  // namespace

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

std::string to_string(RewardMode mode) {
  return mode == RewardMode::BeamOverOmni ? "text" : "algorithm";
}

RewardMode reward_mode_from_string(const std::string& s) {
  if (s == "text") return RewardMode::BeamOverOmni;
  if (s == "algorithm") return RewardMode::OmniOverBeam;
  bad_field("reward_mode", "must be 'text' or 'algorithm'");
}

void RunConfig::validate() const {
  if (n_bs < 1) bad_field("n_bs", "must be >= 1");
  if (static_cast<int>(bs_positions.size()) != n_bs)
    bad_field("bs_positions", "must list exactly n_bs positions");
  if (n_ue < 1) bad_field("n_ue", "must be >= 1");
  if (n_tx_antennas < 1) bad_field("n_tx_antennas", "must be >= 1");
  if (n_rx_antennas < 1) bad_field("n_rx_antennas", "must be >= 1");
  if (!(antenna_spacing > 0.0)) bad_field("antenna_spacing", "must be > 0");
  if (codebook_size < 1) bad_field("codebook_size", "must be >= 1");
  if (codebook_design != "angle" && codebook_design != "sin")
    bad_field("codebook_design", "must be 'angle' or 'sin'");
  if (memory_length < 1) bad_field("memory_length", "must be >= 1");
  if (step_cap < 1) bad_field("step_cap", "must be >= 1");
  if (episodes < 1) bad_field("episodes", "must be >= 1");
  if (!(gamma > 0.0) || gamma > 1.0) bad_field("gamma", "must be in (0, 1]");
  if (learning_rates.empty()) bad_field("learning_rates", "must be non-empty");
  for (double lr : learning_rates)
    if (!(lr > 0.0)) bad_field("learning_rates", "entries must be > 0");
  if (epsilon_min < 0.0 || epsilon_max > 1.0 || epsilon_min > epsilon_max)
    bad_field("epsilon_min/epsilon_max", "must satisfy 0 <= min <= max <= 1");
  if (!(epsilon_decay_fraction > 0.0) || epsilon_decay_fraction > 1.0)
    bad_field("epsilon_decay_fraction", "must be in (0, 1]");
  if (batch_size < 1) bad_field("batch_size", "must be >= 1");
  if (replay_capacity < static_cast<std::size_t>(batch_size))
    bad_field("replay_capacity", "must cover one batch");
  if (target_sync_period < 1) bad_field("target_sync_period", "must be >= 1");
  if (checkpoint_period < 1) bad_field("checkpoint_period", "must be >= 1");
  if (eval_episodes < 1) bad_field("eval_episodes", "must be >= 1");
  if (!(street.half_length > 0.0)) bad_field("street.half_length", "must be > 0");
  if (!(street.half_width > 0.0)) bad_field("street.half_width", "must be > 0");
  if (!(street.speed_min > 0.0) || street.speed_min > street.speed_max)
    bad_field("street.speed_min/speed_max", "must satisfy 0 < min <= max");
  try {
    propagation.validate();
  } catch (const std::invalid_argument& e) {
    bad_field("propagation", e.what());
  }
}

double RunConfig::tx_power_w() const { return dbm_to_watts(tx_power_dbm); }
double RunConfig::noise_power_w() const { return dbm_to_watts(noise_power_dbm); }

double RunConfig::learning_rate_for(int bs_id) const {
  return learning_rates[static_cast<std::size_t>(bs_id) % learning_rates.size()];
}

double RunConfig::epsilon_for_episode(int episode) const {
  const double decay_span = epsilon_decay_fraction * episodes;
  if (decay_span <= 0.0 || episode >= decay_span) return epsilon_min;
  const double progress = episode / decay_span;
  return std::max(epsilon_min,
                  epsilon_max - (epsilon_max - epsilon_min) * progress);
}

std::vector<BaseStation> RunConfig::make_base_stations() const {
  std::vector<BaseStation> bss;
  bss.reserve(n_bs);
  for (int j = 0; j < n_bs; ++j)
    bss.push_back({j, bs_positions[static_cast<std::size_t>(j)], tx_power_w(),
                   ArrayGeometry::ula(n_tx_antennas, antenna_spacing),
                   bs_broadside_deg * std::numbers::pi / 180.0});
  return bss;
}

ArrayGeometry RunConfig::ue_array() const {
  return ArrayGeometry::ula(n_rx_antennas, antenna_spacing);
}

Codebook RunConfig::make_codebook() const {
  const ArrayGeometry geom = ArrayGeometry::ula(n_tx_antennas, antenna_spacing);
  return codebook_design == "sin"
             ? Codebook::uniform_sin_ula(geom, codebook_size)
             : Codebook::uniform_angle_ula(geom, codebook_size);
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["n_bs"] = n_bs;
  nlohmann::json pos = nlohmann::json::array();
  for (const auto& p : bs_positions) pos.push_back({p.x(), p.y()});
  j["bs_positions"] = std::move(pos);
  j["n_ue"] = n_ue;
  j["n_tx_antennas"] = n_tx_antennas;
  j["n_rx_antennas"] = n_rx_antennas;
  j["antenna_spacing"] = antenna_spacing;
  j["tx_power_dbm"] = tx_power_dbm;
  j["noise_power_dbm"] = noise_power_dbm;
  j["bs_broadside_deg"] = bs_broadside_deg;
  j["averaged_pilots"] = averaged_pilots;
  j["codebook_size"] = codebook_size;
  j["codebook_design"] = codebook_design;
  j["memory_length"] = memory_length;
  j["step_cap"] = step_cap;
  j["episodes"] = episodes;
  j["gamma"] = gamma;
  j["learning_rates"] = learning_rates;
  j["epsilon_max"] = epsilon_max;
  j["epsilon_min"] = epsilon_min;
  j["epsilon_decay_fraction"] = epsilon_decay_fraction;
  j["batch_size"] = batch_size;
  j["replay_capacity"] = replay_capacity;
  j["target_sync_period"] = target_sync_period;
  j["include_locations"] = include_locations;
  j["reward_mode"] = to_string(reward_mode);
  j["master_seed"] = master_seed;
  j["checkpoint_period"] = checkpoint_period;
  j["eval_episodes"] = eval_episodes;
  j["out_dir"] = out_dir;
  j["propagation"] = {{"kappa_los_db", propagation.kappa_los_db},
                      {"alpha_los", propagation.alpha_los},
                      {"kappa_nlos_db", propagation.kappa_nlos_db},
                      {"alpha_nlos", propagation.alpha_nlos},
                      {"sigma_v_los_db", propagation.sigma_v_los_db},
                      {"sigma_v_nlos_db", propagation.sigma_v_nlos_db},
                      {"mu_v_db", propagation.mu_v_db},
                      {"shadow_corr_distance_m", propagation.shadow_corr_distance_m},
                      {"los_corr_distance_m", propagation.los_corr_distance_m},
                      {"gain_corr_distance_m", propagation.gain_corr_distance_m}};
  j["street"] = {{"half_length", street.half_length},
                 {"half_width", street.half_width},
                 {"speed_min", street.speed_min},
                 {"speed_max", street.speed_max}};
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "n_bs",           "bs_positions",    "n_ue",
      "n_tx_antennas",  "n_rx_antennas",   "antenna_spacing",
      "tx_power_dbm",   "noise_power_dbm", "codebook_size",
      "codebook_design", "bs_broadside_deg", "averaged_pilots",
      "memory_length",  "step_cap",        "episodes",
      "gamma",          "learning_rates",  "epsilon_max",
      "epsilon_min",    "epsilon_decay_fraction", "batch_size",
      "replay_capacity", "target_sync_period", "include_locations",
      "reward_mode",    "master_seed",     "checkpoint_period",
      "eval_episodes",  "out_dir",         "propagation",
      "street"};
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) bad_field(key, "is not a recognized field");

  RunConfig c;
  read_field(j, "n_bs", c.n_bs);
  if (auto it = j.find("bs_positions"); it != j.end()) {
    c.bs_positions.clear();
    for (const auto& p : *it) {
      if (p.size() != 2) bad_field("bs_positions", "entries must be [x, y]");
      c.bs_positions.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    }
  } else if (c.n_bs <= static_cast<int>(c.bs_positions.size())) {
    c.bs_positions.resize(static_cast<std::size_t>(c.n_bs));
  }
  read_field(j, "n_ue", c.n_ue);
  read_field(j, "n_tx_antennas", c.n_tx_antennas);
  read_field(j, "n_rx_antennas", c.n_rx_antennas);
  read_field(j, "antenna_spacing", c.antenna_spacing);
  read_field(j, "tx_power_dbm", c.tx_power_dbm);
  read_field(j, "noise_power_dbm", c.noise_power_dbm);
  read_field(j, "bs_broadside_deg", c.bs_broadside_deg);
  read_field(j, "averaged_pilots", c.averaged_pilots);
  read_field(j, "codebook_size", c.codebook_size);
  read_field(j, "codebook_design", c.codebook_design);
  read_field(j, "memory_length", c.memory_length);
  read_field(j, "step_cap", c.step_cap);
  read_field(j, "episodes", c.episodes);
  read_field(j, "gamma", c.gamma);
  read_field(j, "learning_rates", c.learning_rates);
  read_field(j, "epsilon_max", c.epsilon_max);
  read_field(j, "epsilon_min", c.epsilon_min);
  read_field(j, "epsilon_decay_fraction", c.epsilon_decay_fraction);
  read_field(j, "batch_size", c.batch_size);
  read_field(j, "replay_capacity", c.replay_capacity);
  read_field(j, "target_sync_period", c.target_sync_period);
  read_field(j, "include_locations", c.include_locations);
  if (auto it = j.find("reward_mode"); it != j.end())
    c.reward_mode = reward_mode_from_string(it->get<std::string>());
  read_field(j, "master_seed", c.master_seed);
  read_field(j, "checkpoint_period", c.checkpoint_period);
  read_field(j, "eval_episodes", c.eval_episodes);
  read_field(j, "out_dir", c.out_dir);
  if (auto it = j.find("propagation"); it != j.end()) {
    const auto& p = *it;
    read_field(p, "kappa_los_db", c.propagation.kappa_los_db);
    read_field(p, "alpha_los", c.propagation.alpha_los);
    read_field(p, "kappa_nlos_db", c.propagation.kappa_nlos_db);
    read_field(p, "alpha_nlos", c.propagation.alpha_nlos);
    read_field(p, "sigma_v_los_db", c.propagation.sigma_v_los_db);
    read_field(p, "sigma_v_nlos_db", c.propagation.sigma_v_nlos_db);
    read_field(p, "mu_v_db", c.propagation.mu_v_db);
    read_field(p, "shadow_corr_distance_m", c.propagation.shadow_corr_distance_m);
    read_field(p, "los_corr_distance_m", c.propagation.los_corr_distance_m);
    read_field(p, "gain_corr_distance_m", c.propagation.gain_corr_distance_m);
  }
  if (auto it = j.find("street"); it != j.end()) {
    const auto& s = *it;
    read_field(s, "half_length", c.street.half_length);
    read_field(s, "half_width", c.street.half_width);
    read_field(s, "speed_min", c.street.speed_min);
    read_field(s, "speed_max", c.street.speed_max);
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config: " + path.string());
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

void RunConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write config: " + path.string());
  out << to_json().dump(2) << '\n';
}

}  // namespace mmbf

// SPDX-License-Identifier: Apache-2.0
#include "mmbf/agent.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace mmbf {

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) throw std::invalid_argument("empty matrix in checkpoint");
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j.at(r);
    if (static_cast<Eigen::Index>(row.size()) != cols)
      throw std::invalid_argument("ragged matrix in checkpoint");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(c).get<double>();
  }
  return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j.at(i).get<double>();
  return v;
}

nlohmann::json params_to_json(const MlpParams& p) {
  nlohmann::json j;
  for (int l = 0; l < 3; ++l) {
    j["w" + std::to_string(l + 1)] = matrix_to_json(p.w[l]);
    j["b" + std::to_string(l + 1)] = vector_to_json(p.b[l]);
  }
  return j;
}

MlpParams params_from_json(const nlohmann::json& j) {
  MlpParams p;
  for (int l = 0; l < 3; ++l) {
    p.w[l] = matrix_from_json(j.at("w" + std::to_string(l + 1)));
    p.b[l] = vector_from_json(j.at("b" + std::to_string(l + 1)));
  }
  return p;
}

}  // namespace

double reward_ratio(double r_beam, double r_omni, RewardMode mode) {
  if (mode == RewardMode::BeamOverOmni)
    return r_omni > 0.0 ? r_beam / r_omni : 0.0;
  return r_beam > 0.0 ? r_omni / r_beam : 0.0;
}

Eigen::VectorXd build_state(const std::vector<UserEquipment>& ues,
                            const std::vector<int>& serving_bs, int bs_id,
                            bool include_locations, double position_scale,
                            std::span<const int> slot_ids) {
  const int n_slots = static_cast<int>(slot_ids.size());
  int memory_length = 0;
  for (const UserEquipment& ue : ues)
    memory_length = std::max(memory_length, ue.memory.length());
  for (const UserEquipment& ue : ues)
    if (ue.memory.length() != memory_length)
      throw std::invalid_argument("all UE memories must share one length");

  const int dim = n_slots * memory_length + (include_locations ? 2 * n_slots : 0);
  Eigen::VectorXd state = Eigen::VectorXd::Zero(dim);
  for (int s = 0; s < n_slots; ++s) {
    const int id = slot_ids[s];
    if (id < 0) continue;
    const UserEquipment& ue = ues.at(static_cast<size_t>(id));
    if (serving_bs.at(static_cast<size_t>(id)) != bs_id) continue;
    const std::vector<double>& mem = ue.memory.values();
    for (int t = 0; t < memory_length; ++t)
      state(s * memory_length + t) =
          std::clamp(mem[static_cast<size_t>(t)] / kStateRateScale, 0.0, 1.0);
    if (include_locations) {
      const int base = n_slots * memory_length + 2 * s;
      state(base) = ue.position.x() / position_scale;
      state(base + 1) = ue.position.y() / position_scale;
    }
  }
  return state;
}

int greedy_action(const Eigen::VectorXd& q) {
  int best = 0;
  for (int i = 1; i < q.size(); ++i)
    if (q(i) > q(best)) best = i;
  return best;
}

int select_action(const Eigen::VectorXd& q, double epsilon, Rng& rng) {
  if (epsilon < 0.0 || epsilon > 1.0)
    throw std::invalid_argument("epsilon must be in [0, 1]");
  if (rng.uniform() < epsilon)
    return rng.uniform_int(static_cast<int>(q.size()));
  return greedy_action(q);
}

double ddqn_target(double reward, bool terminal,
                   const Eigen::VectorXd& q_next_online,
                   const Eigen::VectorXd& q_next_target, double gamma) {
  if (terminal) return reward;
  return reward + gamma * q_next_target(greedy_action(q_next_online));
}

std::vector<double> ddqn_targets(const std::vector<Experience>& batch,
                                 const MlpParams& online,
                                 const MlpParams& target, double gamma) {
  if (batch.empty()) throw std::invalid_argument("batch must be non-empty");
  std::vector<double> targets;
  targets.reserve(batch.size());
  for (const Experience& e : batch) {
    if (e.terminal) {
      targets.push_back(e.reward);
      continue;
    }
    const Eigen::VectorXd q_online = mlp_forward(online, e.next_state);
    const Eigen::VectorXd q_target = mlp_forward(target, e.next_state);
    targets.push_back(ddqn_target(e.reward, false, q_online, q_target, gamma));
  }
  return targets;
}

std::pair<double, MlpParams> loss_and_gradients(
    const MlpParams& params, const std::vector<Experience>& batch,
    const std::vector<double>& targets) {
  if (batch.empty()) throw std::invalid_argument("batch must be non-empty");
  if (batch.size() != targets.size())
    throw std::invalid_argument("one target per experience required");
  MlpParams grads = MlpParams::zeros_like(params);
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const MlpCache cache = mlp_forward_cached(params, batch[i].state);
    loss += inv_batch * accumulate_action_grad(params, cache, batch[i].action,
                                               targets[i], inv_batch, grads);
  }
  return {loss, std::move(grads)};
}

void AgentConfig::validate() const {
  if (n_ue_slots < 1) throw std::invalid_argument("n_ue_slots must be >= 1");
  if (memory_length < 1) throw std::invalid_argument("memory_length must be >= 1");
  if (n_actions < 1) throw std::invalid_argument("n_actions must be >= 1");
  if (!(gamma > 0.0) || gamma > 1.0)
    throw std::invalid_argument("gamma must be in (0, 1]");
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("learning_rate must be > 0");
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (replay_capacity < static_cast<std::size_t>(batch_size))
    throw std::invalid_argument("replay_capacity must cover one batch");
  if (target_sync_period < 1)
    throw std::invalid_argument("target_sync_period must be >= 1");
  if (!(position_scale > 0.0))
    throw std::invalid_argument("position_scale must be > 0");
}

AgentBrain::AgentBrain(AgentConfig cfg, Rng& init_rng)
    : cfg_(cfg),
      online_(MlpParams::glorot(init_rng, cfg.input_dim(), cfg.hidden1(),
                                cfg.hidden2(), cfg.n_actions)),
      target_(online_),
      adam_(AdamState::zeros_like(online_)),
      replay_(cfg.replay_capacity) {
  cfg_.validate();
}

AgentBrain::AgentBrain(AgentConfig cfg, MlpParams online, MlpParams target,
                       AdamState adam, double epsilon, long grad_steps)
    : cfg_(cfg),
      online_(std::move(online)),
      target_(std::move(target)),
      adam_(std::move(adam)),
      replay_(cfg.replay_capacity),
      epsilon_(epsilon),
      grad_steps_(grad_steps) {
  cfg_.validate();
}

void AgentBrain::set_epsilon(double eps) {
  if (eps < 0.0 || eps > 1.0)
    throw std::invalid_argument("epsilon must be in [0, 1]");
  epsilon_ = eps;
}

Eigen::VectorXd AgentBrain::q_values(const Eigen::VectorXd& state) const {
  return mlp_forward(online_, state);
}

int AgentBrain::act(const Eigen::VectorXd& state, Rng& explore_rng) const {
  return select_action(q_values(state), epsilon_, explore_rng);
}

std::optional<double> AgentBrain::learn(Rng& sample_rng) {
  if (!replay_.ready(static_cast<std::size_t>(cfg_.batch_size)))
    return std::nullopt;
  const std::vector<Experience> batch =
      replay_.sample(sample_rng, static_cast<std::size_t>(cfg_.batch_size));
  const std::vector<double> targets =
      ddqn_targets(batch, online_, target_, cfg_.gamma);
  auto [loss, grads] = loss_and_gradients(online_, batch, targets);
  adam_step(online_, grads, adam_, cfg_.learning_rate);
  ++grad_steps_;
  if (grad_steps_ % cfg_.target_sync_period == 0) sync_target();
  return loss;
}

nlohmann::json AgentBrain::to_json() const {
  nlohmann::json j;
  j["format"] = "mmbf-agent-v1";
  j["bs_id"] = cfg_.bs_id;
  j["n_ue_slots"] = cfg_.n_ue_slots;
  j["memory_length"] = cfg_.memory_length;
  j["n_actions"] = cfg_.n_actions;
  j["include_locations"] = cfg_.include_locations;
  j["gamma"] = cfg_.gamma;
  j["learning_rate"] = cfg_.learning_rate;
  j["batch_size"] = cfg_.batch_size;
  j["replay_capacity"] = cfg_.replay_capacity;
  j["target_sync_period"] = cfg_.target_sync_period;
  j["position_scale"] = cfg_.position_scale;
  j["epsilon"] = epsilon_;
  j["grad_steps"] = grad_steps_;
  j["layer_shapes"] = nlohmann::json::array();
  for (int l = 0; l < 3; ++l)
    j["layer_shapes"].push_back({online_.w[l].rows(), online_.w[l].cols()});
  j["online"] = params_to_json(online_);
  j["target"] = params_to_json(target_);
  j["adam"] = {{"step", adam_.step},
               {"m", params_to_json({adam_.m_w, adam_.m_b})},
               {"v", params_to_json({adam_.v_w, adam_.v_b})}};
  return j;
}

AgentBrain AgentBrain::from_json(const nlohmann::json& j) {
  if (j.at("format").get<std::string>() != "mmbf-agent-v1")
    throw std::invalid_argument("unrecognized checkpoint format");
  AgentConfig cfg;
  cfg.bs_id = j.at("bs_id").get<int>();
  cfg.n_ue_slots = j.at("n_ue_slots").get<int>();
  cfg.memory_length = j.at("memory_length").get<int>();
  cfg.n_actions = j.at("n_actions").get<int>();
  cfg.include_locations = j.at("include_locations").get<bool>();
  cfg.gamma = j.at("gamma").get<double>();
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.batch_size = j.at("batch_size").get<int>();
  cfg.replay_capacity = j.at("replay_capacity").get<std::size_t>();
  cfg.target_sync_period = j.at("target_sync_period").get<int>();
  cfg.position_scale = j.at("position_scale").get<double>();

  MlpParams online = params_from_json(j.at("online"));
  MlpParams target = params_from_json(j.at("target"));
  MlpParams m = params_from_json(j.at("adam").at("m"));
  MlpParams v = params_from_json(j.at("adam").at("v"));
  AdamState adam;
  adam.step = j.at("adam").at("step").get<long>();
  adam.m_w = std::move(m.w);
  adam.m_b = std::move(m.b);
  adam.v_w = std::move(v.w);
  adam.v_b = std::move(v.b);

  if (online.input_dim() != cfg.input_dim() ||
      online.output_dim() != cfg.n_actions)
    throw std::invalid_argument("checkpoint shapes do not match its config");

  return AgentBrain(cfg, std::move(online), std::move(target), std::move(adam),
                    j.at("epsilon").get<double>(), j.at("grad_steps").get<long>());
}

void AgentBrain::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
  out << to_json().dump(2) << '\n';
  if (!out) throw std::runtime_error("checkpoint write failed: " + path.string());
}

AgentBrain AgentBrain::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path.string());
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

}  // namespace mmbf

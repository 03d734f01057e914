// SPDX-License-Identifier: Apache-2.0
#include "mmbf/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "mmbf/agent.hpp"
#include "mmbf/metrics.hpp"

namespace mmbf {

namespace {

namespace fs = std::filesystem;

struct PendingTransition {
  Eigen::VectorXd state;
  int action = 0;
  double reward = 0.0;
};

std::vector<int> identity_slots(int k) {
  std::vector<int> slots(static_cast<std::size_t>(k));
  std::iota(slots.begin(), slots.end(), 0);
  return slots;
}

/// Sorted k_train-element subset of {0, ..., k_test-1}, drawn by partial
/// Fisher-Yates; used when evaluating with more UEs than the model knows.
std::vector<int> subset_slots(Rng& rng, int k_test, int k_train) {
  std::vector<int> ids = identity_slots(k_test);
  for (int i = 0; i < k_train; ++i) {
    const int j = i + rng.uniform_int(k_test - i);
    std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
  }
  ids.resize(static_cast<std::size_t>(k_train));
  std::sort(ids.begin(), ids.end());
  return ids;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory " + dir.string() +
                             ": " + ec.message());
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

/// Shared per-run fixtures derived from the config.
struct Scenario {
  std::vector<BaseStation> bss;
  ArrayGeometry ue_array;
  Codebook codebook;
  double noise_w;

  explicit Scenario(const RunConfig& cfg)
      : bss(cfg.make_base_stations()),
        ue_array(cfg.ue_array()),
        codebook(cfg.make_codebook()),
        noise_w(cfg.noise_power_w()) {}
};

}  // namespace

nlohmann::json EvalSummary::to_json() const {
  return {{"episodes", episodes},
          {"k_train", k_train},
          {"k_test", k_test},
          {"mean_sum_ddqn", mean_sum_ddqn},
          {"std_sum_ddqn", std_sum_ddqn},
          {"mean_sum_exhaustive", mean_sum_exhaustive},
          {"std_sum_exhaustive", std_sum_exhaustive},
          {"mean_sum_random", mean_sum_random},
          {"std_sum_random", std_sum_random},
          {"ratio_ddqn_exhaustive", ratio_ddqn_exhaustive}};
}

EvalSummary EvalSummary::from_json(const nlohmann::json& j) {
  EvalSummary s;
  s.episodes = j.at("episodes").get<int>();
  s.k_train = j.at("k_train").get<int>();
  s.k_test = j.at("k_test").get<int>();
  s.mean_sum_ddqn = j.at("mean_sum_ddqn").get<double>();
  s.std_sum_ddqn = j.at("std_sum_ddqn").get<double>();
  s.mean_sum_exhaustive = j.at("mean_sum_exhaustive").get<double>();
  s.std_sum_exhaustive = j.at("std_sum_exhaustive").get<double>();
  s.mean_sum_random = j.at("mean_sum_random").get<double>();
  s.std_sum_random = j.at("std_sum_random").get<double>();
  s.ratio_ddqn_exhaustive = j.at("ratio_ddqn_exhaustive").get<double>();
  return s;
}

fs::path checkpoint_path(const fs::path& dir, int bs_id) {
  return dir / ("agent_" + std::to_string(bs_id) + ".ckpt");
}

void train(const RunConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  const Scenario sc(cfg);
  MetricsWriter writer(out_dir / "metrics.csv");

  std::vector<AgentBrain> agents;
  std::vector<Rng> explore_rngs;
  std::vector<Rng> replay_rngs;
  agents.reserve(static_cast<std::size_t>(cfg.n_bs));
  for (int j = 0; j < cfg.n_bs; ++j) {
    AgentConfig ac;
    ac.bs_id = j;
    ac.n_ue_slots = cfg.n_ue;
    ac.memory_length = cfg.memory_length;
    ac.n_actions = cfg.codebook_size;
    ac.include_locations = cfg.include_locations;
    ac.gamma = cfg.gamma;
    ac.learning_rate = cfg.learning_rate_for(j);
    ac.batch_size = cfg.batch_size;
    ac.replay_capacity = cfg.replay_capacity;
    ac.target_sync_period = cfg.target_sync_period;
    ac.position_scale = cfg.street.half_length;
    Rng init_rng(derive_seed(derive_seed(cfg.master_seed, "weights"),
                             static_cast<std::uint64_t>(j)));
    agents.emplace_back(ac, init_rng);
    explore_rngs.emplace_back(derive_seed(derive_seed(cfg.master_seed, "explore"),
                                          static_cast<std::uint64_t>(j)));
    replay_rngs.emplace_back(derive_seed(derive_seed(cfg.master_seed, "replay"),
                                         static_cast<std::uint64_t>(j)));
  }
  Rng random_baseline_rng(derive_seed(cfg.master_seed, "random-baseline"));

  const std::uint64_t mobility_base = derive_seed(cfg.master_seed, "mobility");
  const std::uint64_t channel_base = derive_seed(cfg.master_seed, "channel");
  const std::vector<int> slots = identity_slots(cfg.n_ue);
  const int state_dim = agents.front().config().input_dim();

  auto save_checkpoints = [&] {
    for (int j = 0; j < cfg.n_bs; ++j)
      agents[static_cast<std::size_t>(j)].save(checkpoint_path(out_dir, j));
  };

  for (int episode = 0; episode < cfg.episodes; ++episode) {
    const double eps = cfg.epsilon_for_episode(episode);
    for (auto& agent : agents) agent.set_epsilon(eps);

    Rng mobility_rng(derive_seed(mobility_base, static_cast<std::uint64_t>(episode)));
    std::vector<UserEquipment> ues =
        spawn_episode(mobility_rng, cfg.street, cfg.n_ue, cfg.memory_length);
    const std::uint64_t episode_seed =
        derive_seed(channel_base, static_cast<std::uint64_t>(episode));
    LinkTracks tracks = make_link_tracks(cfg.n_bs, cfg.n_ue);
    std::vector<std::optional<PendingTransition>> pending(
        static_cast<std::size_t>(cfg.n_bs));

    for (int t = 1;; ++t) {
      advance(ues, cfg.street);
      if (all_inactive(ues) || t > cfg.step_cap) {
        // The previous action's next state is terminal.
        for (int j = 0; j < cfg.n_bs; ++j) {
          auto& p = pending[static_cast<std::size_t>(j)];
          if (!p) continue;
          agents[static_cast<std::size_t>(j)].store(
              {std::move(p->state), p->action, p->reward,
               Eigen::VectorXd::Zero(state_dim), true});
          p.reset();
        }
        break;
      }

      NetworkSnapshot snap =
          realize_links(derive_seed(episode_seed, static_cast<std::uint64_t>(t)),
                        sc.bss, ues, cfg.propagation, sc.ue_array, t, tracks);
      omni_phase(sc.bss, ues, snap, sc.noise_w, cfg.averaged_pilots);
      const RateTable table = build_rate_table(sc.bss, snap, sc.codebook, sc.noise_w);

      std::vector<Eigen::VectorXd> states;
      states.reserve(static_cast<std::size_t>(cfg.n_bs));
      for (int j = 0; j < cfg.n_bs; ++j)
        states.push_back(build_state(ues, snap.serving_bs, j,
                                     cfg.include_locations,
                                     cfg.street.half_length, slots));

      // Completed transitions from the previous step land in the buffers,
      // then each agent takes one gradient step once its buffer is ready.
      std::vector<std::optional<double>> losses(static_cast<std::size_t>(cfg.n_bs));
      for (int j = 0; j < cfg.n_bs; ++j) {
        auto& p = pending[static_cast<std::size_t>(j)];
        if (p) {
          agents[static_cast<std::size_t>(j)].store(
              {std::move(p->state), p->action, p->reward,
               states[static_cast<std::size_t>(j)], false});
          p.reset();
        }
        losses[static_cast<std::size_t>(j)] =
            agents[static_cast<std::size_t>(j)].learn(
                replay_rngs[static_cast<std::size_t>(j)]);
      }

      std::vector<int> actions(static_cast<std::size_t>(cfg.n_bs));
      for (int j = 0; j < cfg.n_bs; ++j)
        actions[static_cast<std::size_t>(j)] =
            agents[static_cast<std::size_t>(j)].act(
                states[static_cast<std::size_t>(j)],
                explore_rngs[static_cast<std::size_t>(j)]);

      const RateOutcome applied = beamformed_rates(table, actions);
      const auto [_, sum_exhaustive] = exhaustive_best(table);
      const RateOutcome random_outcome = beamformed_rates(
          table, random_policy(random_baseline_rng, cfg.n_bs, cfg.codebook_size));

      for (int j = 0; j < cfg.n_bs; ++j) {
        const double r_beam = applied.per_bs[static_cast<std::size_t>(j)];
        const double r_omni = snap.bs_omni_rate[static_cast<std::size_t>(j)];
        const double reward = reward_ratio(r_beam, r_omni, cfg.reward_mode);
        pending[static_cast<std::size_t>(j)] = PendingTransition{
            states[static_cast<std::size_t>(j)],
            actions[static_cast<std::size_t>(j)], reward};
        writer.write({episode, t, j, actions[static_cast<std::size_t>(j)],
                      reward, r_omni, r_beam, applied.sum, sum_exhaustive,
                      random_outcome.sum, eps,
                      losses[static_cast<std::size_t>(j)]});
      }
    }

    if ((episode + 1) % cfg.checkpoint_period == 0) save_checkpoints();
  }
  save_checkpoints();
}

EvalSummary evaluate(const RunConfig& cfg, const fs::path& ckpt_dir,
                     const fs::path& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  const Scenario sc(cfg);

  std::vector<AgentBrain> agents;
  agents.reserve(static_cast<std::size_t>(cfg.n_bs));
  for (int j = 0; j < cfg.n_bs; ++j) {
    const fs::path path = checkpoint_path(ckpt_dir, j);
    if (!fs::exists(path))
      throw std::runtime_error("missing checkpoint: " + path.string());
    agents.push_back(AgentBrain::load(path));
    agents.back().set_epsilon(0.0);  // greedy evaluation
  }
  const int k_train = agents.front().config().n_ue_slots;
  for (const auto& agent : agents)
    if (agent.config().n_ue_slots != k_train)
      throw std::runtime_error("checkpoints disagree on the trained UE count");
  const int k_test = cfg.n_ue;

  MetricsWriter writer(out_dir / "metrics.csv");
  Rng greedy_rng(derive_seed(cfg.master_seed, "eval-greedy"));
  Rng random_rng(derive_seed(cfg.master_seed, "eval-random-baseline"));
  const std::uint64_t mobility_base = derive_seed(cfg.master_seed, "eval-mobility");
  const std::uint64_t channel_base = derive_seed(cfg.master_seed, "eval-channel");
  const std::uint64_t select_base = derive_seed(cfg.master_seed, "eval-select");

  std::vector<double> ep_ddqn, ep_exhaustive, ep_random;

  for (int episode = 0; episode < cfg.eval_episodes; ++episode) {
    Rng mobility_rng(derive_seed(mobility_base, static_cast<std::uint64_t>(episode)));
    std::vector<UserEquipment> ues =
        spawn_episode(mobility_rng, cfg.street, k_test, cfg.memory_length);
    const std::uint64_t episode_seed =
        derive_seed(channel_base, static_cast<std::uint64_t>(episode));
    LinkTracks tracks = make_link_tracks(cfg.n_bs, k_test);

    // Train/test UE-count mismatch: zero-pad missing slots, or down-select
    // a fresh random subset of UEs each episode.
    std::vector<int> slots;
    if (k_test <= k_train) {
      slots = identity_slots(k_test);
      slots.resize(static_cast<std::size_t>(k_train), -1);
    } else {
      Rng select_rng(derive_seed(select_base, static_cast<std::uint64_t>(episode)));
      slots = subset_slots(select_rng, k_test, k_train);
    }

    double acc_ddqn = 0.0, acc_exhaustive = 0.0, acc_random = 0.0;
    int steps = 0;
    for (int t = 1;; ++t) {
      advance(ues, cfg.street);
      if (all_inactive(ues) || t > cfg.step_cap) break;
      NetworkSnapshot snap =
          realize_links(derive_seed(episode_seed, static_cast<std::uint64_t>(t)),
                        sc.bss, ues, cfg.propagation, sc.ue_array, t, tracks);
      omni_phase(sc.bss, ues, snap, sc.noise_w, cfg.averaged_pilots);
      const RateTable table = build_rate_table(sc.bss, snap, sc.codebook, sc.noise_w);

      std::vector<int> actions(static_cast<std::size_t>(cfg.n_bs));
      for (int j = 0; j < cfg.n_bs; ++j) {
        const Eigen::VectorXd state =
            build_state(ues, snap.serving_bs, j, agents[0].config().include_locations,
                        cfg.street.half_length, slots);
        actions[static_cast<std::size_t>(j)] =
            agents[static_cast<std::size_t>(j)].act(state, greedy_rng);
      }

      const RateOutcome applied = beamformed_rates(table, actions);
      const auto [_, sum_exhaustive] = exhaustive_best(table);
      const RateOutcome random_outcome = beamformed_rates(
          table, random_policy(random_rng, cfg.n_bs, cfg.codebook_size));

      acc_ddqn += applied.sum;
      acc_exhaustive += sum_exhaustive;
      acc_random += random_outcome.sum;
      ++steps;

      for (int j = 0; j < cfg.n_bs; ++j) {
        const double r_beam = applied.per_bs[static_cast<std::size_t>(j)];
        const double r_omni = snap.bs_omni_rate[static_cast<std::size_t>(j)];
        writer.write({episode, t, j, actions[static_cast<std::size_t>(j)],
                      reward_ratio(r_beam, r_omni, cfg.reward_mode), r_omni,
                      r_beam, applied.sum, sum_exhaustive, random_outcome.sum,
                      0.0, std::nullopt});
      }
    }
    if (steps > 0) {
      ep_ddqn.push_back(acc_ddqn / steps);
      ep_exhaustive.push_back(acc_exhaustive / steps);
      ep_random.push_back(acc_random / steps);
    }
  }

  EvalSummary summary;
  summary.episodes = cfg.eval_episodes;
  summary.k_train = k_train;
  summary.k_test = k_test;
  summary.mean_sum_ddqn = mean(ep_ddqn);
  summary.std_sum_ddqn = sample_std(ep_ddqn);
  summary.mean_sum_exhaustive = mean(ep_exhaustive);
  summary.std_sum_exhaustive = sample_std(ep_exhaustive);
  summary.mean_sum_random = mean(ep_random);
  summary.std_sum_random = sample_std(ep_random);
  summary.ratio_ddqn_exhaustive =
      summary.mean_sum_exhaustive > 0.0
          ? summary.mean_sum_ddqn / summary.mean_sum_exhaustive
          : 0.0;

  std::ofstream out(out_dir / "summary.json", std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write summary.json under " +
                             out_dir.string());
  out << summary.to_json().dump(2) << '\n';
  return summary;
}

void baseline(const RunConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  ensure_dir(out_dir);
  const Scenario sc(cfg);
  MetricsWriter writer(out_dir / "metrics.csv");

  Rng policy_rng(derive_seed(cfg.master_seed, "baseline-policy"));
  const std::uint64_t mobility_base = derive_seed(cfg.master_seed, "mobility");
  const std::uint64_t channel_base = derive_seed(cfg.master_seed, "channel");

  for (int episode = 0; episode < cfg.episodes; ++episode) {
    Rng mobility_rng(derive_seed(mobility_base, static_cast<std::uint64_t>(episode)));
    std::vector<UserEquipment> ues =
        spawn_episode(mobility_rng, cfg.street, cfg.n_ue, cfg.memory_length);
    const std::uint64_t episode_seed =
        derive_seed(channel_base, static_cast<std::uint64_t>(episode));
    LinkTracks tracks = make_link_tracks(cfg.n_bs, cfg.n_ue);

    for (int t = 1;; ++t) {
      advance(ues, cfg.street);
      if (all_inactive(ues) || t > cfg.step_cap) break;
      NetworkSnapshot snap =
          realize_links(derive_seed(episode_seed, static_cast<std::uint64_t>(t)),
                        sc.bss, ues, cfg.propagation, sc.ue_array, t, tracks);
      omni_phase(sc.bss, ues, snap, sc.noise_w, cfg.averaged_pilots);
      const RateTable table = build_rate_table(sc.bss, snap, sc.codebook, sc.noise_w);

      const std::vector<int> actions =
          random_policy(policy_rng, cfg.n_bs, cfg.codebook_size);
      const RateOutcome applied = beamformed_rates(table, actions);
      const auto [_, sum_exhaustive] = exhaustive_best(table);

      for (int j = 0; j < cfg.n_bs; ++j) {
        const double r_beam = applied.per_bs[static_cast<std::size_t>(j)];
        const double r_omni = snap.bs_omni_rate[static_cast<std::size_t>(j)];
        writer.write({episode, t, j, actions[static_cast<std::size_t>(j)],
                      reward_ratio(r_beam, r_omni, cfg.reward_mode), r_omni,
                      r_beam, applied.sum, sum_exhaustive, applied.sum, 1.0,
                      std::nullopt});
      }
    }
  }
}

}  // namespace mmbf

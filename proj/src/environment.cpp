// SPDX-License-Identifier: Apache-2.0
#include "mmbf/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mmbf {

namespace {

constexpr double kNlosAngleSpreadRad = 15.0 * std::numbers::pi / 180.0;

}  // namespace

void RateMemory::push(double rate) {
  values_.erase(values_.begin());
  values_.push_back(rate);
}

std::vector<UserEquipment> spawn_episode(Rng& rng, const StreetWorld& world,
                                         int n_ue, int memory_length) {
  if (n_ue < 1) throw std::invalid_argument("spawn_episode requires n_ue >= 1");
  std::vector<UserEquipment> ues;
  ues.reserve(n_ue);
  for (int k = 0; k < n_ue; ++k) {
    UserEquipment ue;
    ue.id = k;
    ue.travel_axis = rng.bernoulli(0.5) ? 1 : 0;
    const double direction = rng.bernoulli(0.5) ? 1.0 : -1.0;
    const double lane = rng.uniform(-world.half_width, world.half_width);
    const double speed = rng.uniform(world.speed_min, world.speed_max);
    const double start = -direction * world.half_length;
    if (ue.travel_axis == 0) {
      ue.position = {start, lane};
      ue.velocity = {direction * speed, 0.0};
    } else {
      ue.position = {lane, start};
      ue.velocity = {0.0, direction * speed};
    }
    ue.active = true;
    ue.memory = RateMemory(memory_length);
    ues.push_back(std::move(ue));
  }
  return ues;
}

void advance(std::vector<UserEquipment>& ues, const StreetWorld& world, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("advance requires dt > 0");
  for (UserEquipment& ue : ues) {
    if (!ue.active) continue;
    ue.position += ue.velocity * dt;
    if (std::abs(ue.position(ue.travel_axis)) > world.half_length)
      ue.active = false;
  }
}

bool all_inactive(const std::vector<UserEquipment>& ues) {
  return std::none_of(ues.begin(), ues.end(),
                      [](const UserEquipment& ue) { return ue.active; });
}

LinkTracks make_link_tracks(int n_bs, int n_ue) {
  return LinkTracks(static_cast<size_t>(n_bs),
                    std::vector<LargeScaleTrack>(static_cast<size_t>(n_ue)));
}

NetworkSnapshot realize_links(std::uint64_t step_seed,
                              const std::vector<BaseStation>& bss,
                              const std::vector<UserEquipment>& ues,
                              const PropagationParams& params,
                              const ArrayGeometry& ue_array, int time_step,
                              LinkTracks& tracks) {
  const int n_bs = static_cast<int>(bss.size());
  const int n_ue = static_cast<int>(ues.size());
  if (static_cast<int>(tracks.size()) != n_bs ||
      (n_bs > 0 && static_cast<int>(tracks[0].size()) != n_ue))
    throw std::invalid_argument("link tracks shape must be n_bs x n_ue");
  NetworkSnapshot snap;
  snap.time_step = time_step;
  snap.links.assign(n_bs, std::vector<LinkRealization>(n_ue));
  snap.channels.assign(n_bs, std::vector<Eigen::MatrixXcd>(n_ue));
  snap.pilot_power_w.assign(n_bs, std::vector<double>(n_ue, 0.0));
  snap.serving_bs.assign(n_ue, -1);
  snap.omni_rates.assign(n_ue, 0.0);
  snap.bs_omni_rate.assign(n_bs, 0.0);

  for (int j = 0; j < n_bs; ++j) {
    for (int k = 0; k < n_ue; ++k) {
      if (!ues[k].active) continue;
      Rng rng(derive_seed(step_seed, static_cast<std::uint64_t>(j) * n_ue + k));
      const Eigen::Vector2d delta = ues[k].position - bss[j].position;
      const double r = delta.norm();

      LinkRealization link;
      const LargeScaleDraw large_scale =
          advance_large_scale(rng, tracks[j][k], r, ues[k].position, params);
      link.state = large_scale.state;
      link.shadow_factor = large_scale.shadow_factor;
      link.gain = large_scale.gain;
      link.amplitude_path_loss = amplitude_path_loss(r, link.state, params);
      const double bearing = std::atan2(delta.y(), delta.x());
      link.aod_rad = wrap_angle(bearing - bss[j].broadside_rad);
      link.aoa_rad = wrap_angle(bearing + std::numbers::pi);
      if (link.state == LinkState::Nlos) {
        link.aod_rad = wrap_angle(
            link.aod_rad + rng.uniform(-kNlosAngleSpreadRad, kNlosAngleSpreadRad));
        link.aoa_rad = wrap_angle(
            link.aoa_rad + rng.uniform(-kNlosAngleSpreadRad, kNlosAngleSpreadRad));
      }
      snap.links[j][k] = link;
      snap.channels[j][k] = channel_matrix(link, bss[j].array, ue_array);
    }
  }
  return snap;
}

void omni_phase(const std::vector<BaseStation>& bss,
                std::vector<UserEquipment>& ues, NetworkSnapshot& snap,
                double noise_w, bool averaged_pilots) {
  const int n_bs = static_cast<int>(bss.size());
  const int n_ue = static_cast<int>(ues.size());

  for (int j = 0; j < n_bs; ++j)
    for (int k = 0; k < n_ue; ++k) {
      if (!ues[k].active) {
        snap.pilot_power_w[j][k] = 0.0;
        continue;
      }
      const LinkRealization& link = snap.links[j][k];
      const double small_scale =
          averaged_pilots ? 1.0 : std::norm(link.gain);
      snap.pilot_power_w[j][k] =
          bss[j].tx_power_w * small_scale * link.shadow_factor /
          (link.amplitude_path_loss * link.amplitude_path_loss);
    }

  std::fill(snap.bs_omni_rate.begin(), snap.bs_omni_rate.end(), 0.0);
  for (int k = 0; k < n_ue; ++k) {
    if (!ues[k].active) {
      snap.serving_bs[k] = -1;
      snap.omni_rates[k] = 0.0;
      ues[k].memory.push(0.0);
      continue;
    }
    int best = 0;
    for (int j = 1; j < n_bs; ++j)
      if (snap.pilot_power_w[j][k] > snap.pilot_power_w[best][k]) best = j;
    snap.serving_bs[k] = best;

    double interference = 0.0;
    for (int j = 0; j < n_bs; ++j)
      if (j != best) interference += snap.pilot_power_w[j][k];
    const double rate =
        std::log2(1.0 + snap.pilot_power_w[best][k] / (noise_w + interference));
    snap.omni_rates[k] = rate;
    snap.bs_omni_rate[best] += rate;
    ues[k].memory.push(rate);
  }
}

double beamform_power(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& v) {
  if (h.cols() != v.size())
    throw std::invalid_argument("channel/precoder dimension mismatch");
  if (h.rows() == 1) {
    // 1x1 determinant: |h v|^2.
    return std::norm((h * v)(0, 0));
  }
  const Eigen::MatrixXcd m = h * v * v.adjoint() * h.adjoint();
  return std::abs(m.determinant());
}

RateTable build_rate_table(const std::vector<BaseStation>& bss,
                           const NetworkSnapshot& snap, const Codebook& codebook,
                           double noise_w) {
  RateTable table;
  table.n_bs = static_cast<int>(bss.size());
  table.n_ue = static_cast<int>(snap.serving_bs.size());
  table.n_actions = codebook.size();
  table.noise_w = noise_w;
  table.serving_bs = snap.serving_bs;
  table.beam_power_w.assign(
      static_cast<size_t>(table.n_ue) * table.n_bs * table.n_actions, 0.0);
  for (int k = 0; k < table.n_ue; ++k) {
    if (snap.serving_bs[k] < 0) continue;
    for (int j = 0; j < table.n_bs; ++j) {
      const Eigen::MatrixXcd& h = snap.channels[j][k];
      for (int q = 0; q < table.n_actions; ++q) {
        table.beam_power_w[(static_cast<size_t>(k) * table.n_bs + j) *
                               table.n_actions +
                           q] =
            bss[j].tx_power_w * beamform_power(h, codebook.entries[q]);
      }
    }
  }
  return table;
}

RateOutcome beamformed_rates(const RateTable& table, const std::vector<int>& actions) {
  if (static_cast<int>(actions.size()) != table.n_bs)
    throw std::invalid_argument("one action per base station required");
  for (int a : actions)
    if (a < 0 || a >= table.n_actions)
      throw std::out_of_range("action index outside codebook");

  RateOutcome out;
  out.per_ue.assign(table.n_ue, 0.0);
  out.per_bs.assign(table.n_bs, 0.0);
  for (int k = 0; k < table.n_ue; ++k) {
    const int serving = table.serving_bs[k];
    if (serving < 0) continue;
    const double signal = table.beam_power(k, serving, actions[serving]);
    double interference = 0.0;
    for (int j = 0; j < table.n_bs; ++j)
      if (j != serving) interference += table.beam_power(k, j, actions[j]);
    const double rate = std::log2(1.0 + signal / (table.noise_w + interference));
    out.per_ue[k] = rate;
    out.per_bs[serving] += rate;
    out.sum += rate;
  }
  return out;
}

double sum_rate(const std::vector<double>& per_ue_rates) {
  double total = 0.0;
  for (double r : per_ue_rates) total += r;
  return total;
}

std::pair<std::vector<int>, double> exhaustive_best(const RateTable& table) {
  std::vector<int> current(table.n_bs, 0);
  std::vector<int> best = current;
  double best_sum = beamformed_rates(table, current).sum;
  // Odometer enumeration visits tuples in lexicographic order, so keeping
  // only strict improvements breaks ties toward the smallest tuple.
  for (;;) {
    int pos = table.n_bs - 1;
    while (pos >= 0 && current[pos] == table.n_actions - 1) {
      current[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++current[pos];
    const double sum = beamformed_rates(table, current).sum;
    if (sum > best_sum) {
      best_sum = sum;
      best = current;
    }
  }
  return {best, best_sum};
}

std::vector<int> random_policy(Rng& rng, int n_bs, int n_actions) {
  std::vector<int> actions(n_bs);
  for (int& a : actions) a = rng.uniform_int(n_actions);
  return actions;
}

}  // namespace mmbf

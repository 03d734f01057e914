// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "mmbf/array.hpp"
#include "mmbf/channel.hpp"
#include "mmbf/rng.hpp"

namespace mmbf {

/// Two intersecting streets centered on the axes: x-street spans
/// [-half_length, half_length] x (-half_width, half_width) and the
/// y-street is its transpose.
struct StreetWorld {
  double half_length = 50.0;
  double half_width = 4.0;
  double speed_min = 2.0;
  double speed_max = 5.0;
};

struct BaseStation {
  int id = 0;
  Eigen::Vector2d position{0.0, 0.0};
  double tx_power_w = 1.0;
  ArrayGeometry array = ArrayGeometry::ula(16);
  double broadside_rad = 0.0;  // world bearing the array broadside faces
};

/// Fixed-length omni-rate history, oldest first, zero-filled at episode start.
class RateMemory {
 public:
  explicit RateMemory(int length) : values_(static_cast<size_t>(length), 0.0) {}
  void push(double rate);
  const std::vector<double>& values() const { return values_; }
  int length() const { return static_cast<int>(values_.size()); }

 private:
  std::vector<double> values_;
};

struct UserEquipment {
  int id = 0;
  Eigen::Vector2d position{0.0, 0.0};
  Eigen::Vector2d velocity{0.0, 0.0};
  int travel_axis = 0;  // 0: moves along x, 1: along y
  bool active = true;
  RateMemory memory{8};
};

/// Each UE picks a street, a direction, a lane offset, a street-end start
/// and a constant speed. Velocity never changes afterwards.
std::vector<UserEquipment> spawn_episode(Rng& rng, const StreetWorld& world,
                                         int n_ue, int memory_length);

/// Kinematic step; a UE goes inactive when its along-street coordinate
/// leaves [-half_length, half_length].
void advance(std::vector<UserEquipment>& ues, const StreetWorld& world,
             double dt = 1.0);

/// Episode terminal condition: every UE has left the streets.
bool all_inactive(const std::vector<UserEquipment>& ues);

/// Everything one time step exposes to the policies: per-link channel
/// realizations, pilot powers, the strongest-pilot association, and the
/// omni rates the UEs report back.
struct NetworkSnapshot {
  int time_step = 0;
  std::vector<std::vector<LinkRealization>> links;      // [J][K]
  std::vector<std::vector<Eigen::MatrixXcd>> channels;  // [J][K]; empty for inactive UEs
  std::vector<std::vector<double>> pilot_power_w;       // [J][K]
  std::vector<int> serving_bs;                          // [K], -1 when unassociated
  std::vector<double> omni_rates;                       // [K], bits/s/Hz
  std::vector<double> bs_omni_rate;                     // [J], sum over associated UEs
};

/// Per-(BS, UE) large-scale memory for one episode; fresh tracks make the
/// first step draw every quantity from its marginal distribution.
using LinkTracks = std::vector<std::vector<LargeScaleTrack>>;
LinkTracks make_link_tracks(int n_bs, int n_ue);

/// Draws the LOS state, path loss, shadowing and small-scale gain for
/// every (BS, active UE) pair and forms the channel matrices. The LOS
/// state and shadowing evolve along each UE's track (see
/// advance_large_scale); the complex gain is independent per step. AoD is
/// the UE bearing from the BS array broadside (+x); NLOS links add
/// independent uniform offsets in [-15, +15] degrees to AoD and AoA.
/// Each link draws from its own substream of step_seed, so realizations
/// are independent of enumeration order and of other links.
NetworkSnapshot realize_links(std::uint64_t step_seed,
                              const std::vector<BaseStation>& bss,
                              const std::vector<UserEquipment>& ues,
                              const PropagationParams& params,
                              const ArrayGeometry& ue_array, int time_step,
                              LinkTracks& tracks);

/// Pilot sub-slot: omni pilot powers P_j*|gain|^2*v/p^2, strongest-pilot
/// association (ties to the lowest BS id), per-UE omni rates under mutual
/// pilot interference, per-BS omni sums, and a memory push for every UE
/// (zero for inactive ones). With averaged_pilots the measurement uses
/// the slot-average small-scale power E|gain|^2 = 1 instead of the
/// instantaneous draw.
void omni_phase(const std::vector<BaseStation>& bss,
                std::vector<UserEquipment>& ues, NetworkSnapshot& snap,
                double noise_w, bool averaged_pilots = false);

/// Received beam powers P_j * |H_kj f_q|^2 for every (UE, BS, codeword),
/// precomputed once per step so every policy evaluates rates through the
/// exact same arithmetic.
struct RateTable {
  int n_bs = 0;
  int n_ue = 0;
  int n_actions = 0;
  double noise_w = 0.0;
  std::vector<int> serving_bs;  // [K], -1 when unassociated
  std::vector<double> beam_power_w;  // [K][J][Q] flattened

  double beam_power(int ue, int bs, int action) const {
    return beam_power_w[(static_cast<size_t>(ue) * n_bs + bs) * n_actions + action];
  }
};

RateTable build_rate_table(const std::vector<BaseStation>& bss,
                           const NetworkSnapshot& snap, const Codebook& codebook,
                           double noise_w);

/// Determinant term of the rate expression, |det(H V V^H H^H)|; for a
/// single-antenna receiver this is the scalar |H V|^2.
double beamform_power(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& v);

struct RateOutcome {
  std::vector<double> per_ue;  // [K], zero for inactive/unassociated UEs
  std::vector<double> per_bs;  // [J], sum over the BS's associated UEs
  double sum = 0.0;
};

/// Per-UE rates log2(1 + S/(noise + I)) under one joint codeword choice.
/// Throws std::out_of_range when an action index is outside the codebook.
RateOutcome beamformed_rates(const RateTable& table, const std::vector<int>& actions);

double sum_rate(const std::vector<double>& per_ue_rates);

/// Perfect-CSI enumeration of all |F|^J joint codeword choices; ties break
/// to the lexicographically smallest tuple.
std::pair<std::vector<int>, double> exhaustive_best(const RateTable& table);

/// Uniform independent codeword choice per BS.
std::vector<int> random_policy(Rng& rng, int n_bs, int n_actions);

}  // namespace mmbf

// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "mmbf/config.hpp"
#include "mmbf/environment.hpp"

using namespace mmbf;

namespace {

constexpr double kPi = std::numbers::pi;

StreetWorld default_world() { return {}; }

std::vector<BaseStation> two_bs() {
  return {{0, {5.0, -5.0}, 1.0, ArrayGeometry::ula(16)},
          {1, {-25.0, -5.0}, 1.0, ArrayGeometry::ula(16)}};
}

/// Independent rate route: full complex matrix products and Eigen's
/// determinant instead of the table's scalar fast path.
double rate_by_determinant(const std::vector<std::vector<Eigen::MatrixXcd>>& h,
                           const std::vector<double>& tx_power_w,
                           const Codebook& cb, const std::vector<int>& actions,
                           int ue, int serving, double noise_w) {
  auto det_term = [&](int j) {
    const Eigen::VectorXcd& v = cb.entries[static_cast<size_t>(actions[j])];
    const Eigen::MatrixXcd m = h[static_cast<size_t>(j)][static_cast<size_t>(ue)] *
                               v * v.adjoint() *
                               h[static_cast<size_t>(j)][static_cast<size_t>(ue)].adjoint();
    return std::abs(m.determinant());
  };
  const double signal = tx_power_w[static_cast<size_t>(serving)] * det_term(serving);
  double interference = 0.0;
  for (int j = 0; j < static_cast<int>(h.size()); ++j)
    if (j != serving) interference += tx_power_w[static_cast<size_t>(j)] * det_term(j);
  return std::log2(1.0 + signal / (noise_w + interference));
}

}  // namespace

TEST_CASE("spawn respects street geometry and speed bounds") {
  StreetWorld world = default_world();
  world.speed_min = world.speed_max = 2.0;  // degenerate interval
  Rng rng(21);
  auto ues = spawn_episode(rng, world, 50, 8);
  REQUIRE(ues.size() == 50);
  for (const auto& ue : ues) {
    CHECK(ue.active);
    CHECK(ue.velocity.norm() == doctest::Approx(2.0));
    const int axis = ue.travel_axis;
    CHECK(std::abs(ue.position(axis)) == doctest::Approx(50.0));
    CHECK(std::abs(ue.position(1 - axis)) < 4.0);
    CHECK(ue.velocity(1 - axis) == 0.0);
    // Heading into the street, not out of it.
    CHECK(ue.position(axis) * ue.velocity(axis) < 0.0);
    CHECK(ue.memory.length() == 8);
    for (double m : ue.memory.values()) CHECK(m == 0.0);
  }

  StreetWorld w2 = default_world();
  Rng r1(33), r2(33);
  auto a = spawn_episode(r1, w2, 5, 8);
  auto b = spawn_episode(r2, w2, 5, 8);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].position == b[i].position);
    CHECK(a[i].velocity == b[i].velocity);
  }
}

TEST_CASE("advance moves, deactivates and terminates") {
  StreetWorld world = default_world();
  std::vector<UserEquipment> ues(2);
  ues[0] = {0, {-50.0, 0.0}, {2.0, 0.0}, 0, true, RateMemory(8)};
  ues[1] = {1, {49.5, 0.0}, {2.0, 0.0}, 0, true, RateMemory(8)};

  advance(ues, world);
  CHECK(ues[0].position.x() == doctest::Approx(-48.0));
  CHECK(ues[0].active);
  CHECK(ues[1].position.x() == doctest::Approx(51.5));
  CHECK_FALSE(ues[1].active);
  CHECK_FALSE(all_inactive(ues));

  ues[0].active = false;
  CHECK(all_inactive(ues));

  // Inactive UEs stop moving.
  advance(ues, world);
  CHECK(ues[1].position.x() == doctest::Approx(51.5));
}

TEST_CASE("realize_links covers active UEs only and is seed-stable") {
  StreetWorld world = default_world();
  Rng rng(44);
  auto ues = spawn_episode(rng, world, 4, 8);
  ues[2].active = false;
  PropagationParams params;
  const auto bss = two_bs();
  const auto rx = ArrayGeometry::ula(1);

  LinkTracks tracks1 = make_link_tracks(2, 4);
  LinkTracks tracks2 = make_link_tracks(2, 4);
  auto snap1 = realize_links(777, bss, ues, params, rx, 1, tracks1);
  auto snap2 = realize_links(777, bss, ues, params, rx, 1, tracks2);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 4; ++k) {
      if (k == 2) {
        CHECK(snap1.channels[j][k].size() == 0);
        continue;
      }
      CHECK(snap1.channels[j][k] == snap2.channels[j][k]);
      CHECK(snap1.channels[j][k].rows() == 1);
      CHECK(snap1.channels[j][k].cols() == 16);
    }

  // A UE within 18 m of the BS always gets a LOS link.
  std::vector<UserEquipment> close(1);
  close[0] = {0, {10.0, -5.0}, {2.0, 0.0}, 0, true, RateMemory(8)};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    LinkTracks fresh = make_link_tracks(2, 1);
    auto s = realize_links(seed, bss, close, params, rx, 1, fresh);
    CHECK(s.links[0][0].state == LinkState::Los);
  }
}

TEST_CASE("omni phase association, rates and memory push") {
  const auto bss = two_bs();
  std::vector<UserEquipment> ues(2);
  ues[0] = {0, {5.0, 0.0}, {2.0, 0.0}, 0, true, RateMemory(3)};
  ues[1] = {1, {-25.0, 0.0}, {2.0, 0.0}, 0, true, RateMemory(3)};

  NetworkSnapshot snap;
  snap.links.assign(2, std::vector<LinkRealization>(2));
  snap.channels.assign(2, std::vector<Eigen::MatrixXcd>(2));
  snap.pilot_power_w.assign(2, std::vector<double>(2, 0.0));
  snap.serving_bs.assign(2, -1);
  snap.omni_rates.assign(2, 0.0);
  snap.bs_omni_rate.assign(2, 0.0);

  const double noise_w = 1e-9;
  // Hand-built links: UE0 hears BS1 stronger (2e-9 vs 1e-9 W). UE1 hears
  // both equally; the tie must go to BS0.
  auto link_with_power = [](double rx_power_w) {
    LinkRealization link;
    link.gain = 1.0;
    link.shadow_factor = 1.0;
    link.amplitude_path_loss = 1.0 / std::sqrt(rx_power_w);
    return link;
  };
  snap.links[0][0] = link_with_power(1e-9);
  snap.links[1][0] = link_with_power(2e-9);
  snap.links[0][1] = link_with_power(1e-9);
  snap.links[1][1] = link_with_power(1e-9);

  omni_phase(bss, ues, snap, noise_w);

  CHECK(snap.serving_bs[0] == 1);
  CHECK(snap.serving_bs[1] == 0);

  // UE0: signal 2e-9, interference 1e-9 -> log2(1 + 2/(1+1)) = 1.
  CHECK(snap.omni_rates[0] == doctest::Approx(1.0).epsilon(1e-12));
  // UE1: signal 1e-9, interference 1e-9 -> log2(1.5).
  CHECK(snap.omni_rates[1] == doctest::Approx(std::log2(1.5)).epsilon(1e-12));
  CHECK(snap.bs_omni_rate[0] == doctest::Approx(snap.omni_rates[1]));
  CHECK(snap.bs_omni_rate[1] == doctest::Approx(snap.omni_rates[0]));

  // Memory got the fresh rate at the newest slot.
  CHECK(ues[0].memory.values().back() == doctest::Approx(1.0));
  CHECK(ues[0].memory.values().front() == 0.0);

  // Single BS at pilot power == noise: rate exactly 1 bit/s/Hz.
  std::vector<BaseStation> one_bs = {bss[0]};
  std::vector<UserEquipment> one_ue(1);
  one_ue[0] = {0, {10.0, 0.0}, {2.0, 0.0}, 0, true, RateMemory(3)};
  NetworkSnapshot s1;
  s1.links.assign(1, std::vector<LinkRealization>(1, link_with_power(noise_w)));
  s1.channels.assign(1, std::vector<Eigen::MatrixXcd>(1));
  s1.pilot_power_w.assign(1, std::vector<double>(1, 0.0));
  s1.serving_bs.assign(1, -1);
  s1.omni_rates.assign(1, 0.0);
  s1.bs_omni_rate.assign(1, 0.0);
  omni_phase(one_bs, one_ue, s1, noise_w);
  CHECK(s1.omni_rates[0] == doctest::Approx(1.0).epsilon(1e-12));

  // Inactive UEs associate with nobody and push a zero.
  one_ue[0].active = false;
  omni_phase(one_bs, one_ue, s1, noise_w);
  CHECK(s1.serving_bs[0] == -1);
  CHECK(one_ue[0].memory.values().back() == 0.0);
}

TEST_CASE("codebook satisfies the phase-shifter constraint") {
  const auto geom = ArrayGeometry::ula(16);
  const Codebook cb = Codebook::uniform_angle_ula(geom, 8);
  REQUIRE(cb.size() == 8);
  for (const auto& entry : cb.entries) {
    REQUIRE(entry.size() == 16);
    for (int i = 0; i < 16; ++i)
      CHECK(std::norm(entry(i)) == doctest::Approx(1.0 / 16.0).epsilon(1e-14));
  }
  // Angles are centered quantiles of (-pi/2, pi/2).
  CHECK(cb.angles_rad.front() == doctest::Approx(-kPi / 2 + kPi * 0.5 / 8));
  CHECK(cb.angles_rad.back() == doctest::Approx(kPi / 2 - kPi * 0.5 / 8));
}

TEST_CASE("beamformed rate hand case: aligned beam, unit SNR scaling") {
  // H = 1x16 row of ones, V = a_t(0): |HV|^2 = 16, P/noise = 1
  // -> rate = log2(17).
  const auto geom = ArrayGeometry::ula(16);
  const Codebook cb = Codebook::uniform_angle_ula(geom, 8);

  NetworkSnapshot snap;
  snap.channels.assign(1, std::vector<Eigen::MatrixXcd>(
                              1, Eigen::MatrixXcd::Ones(1, 16)));
  snap.serving_bs.assign(1, 0);
  const std::vector<BaseStation> bss = {{0, {0.0, 0.0}, 1.0, geom}};

  // A broadside codeword is not in the 8-entry codebook, so build one.
  Codebook aligned = cb;
  aligned.entries[0] = ula_response(geom, 0.0);
  RateTable table = build_rate_table(bss, snap, aligned, 1.0);
  auto out = beamformed_rates(table, {0});
  CHECK(out.per_ue[0] == doctest::Approx(4.087462841250339).epsilon(1e-12));
  CHECK(out.per_bs[0] == doctest::Approx(out.per_ue[0]));
  CHECK(out.sum == doctest::Approx(out.per_ue[0]));

  // Zero channel -> zero rate.
  snap.channels[0][0].setZero();
  RateTable zero_table = build_rate_table(bss, snap, aligned, 1.0);
  CHECK(beamformed_rates(zero_table, {0}).sum == 0.0);

  // Action outside the codebook is a contract violation.
  CHECK_THROWS_AS(beamformed_rates(table, {8}), std::out_of_range);
}

TEST_CASE("scalar beam power equals the determinant route") {
  Rng rng(55);
  const auto geom = ArrayGeometry::ula(16);
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::MatrixXcd h(1, 16);
    for (int c = 0; c < 16; ++c) h(0, c) = rng.complex_normal(1.0);
    const Eigen::VectorXcd v = ula_response(geom, rng.uniform(-kPi / 2, kPi / 2));
    const double fast = beamform_power(h, v);
    const Eigen::MatrixXcd m = h * v * v.adjoint() * h.adjoint();
    const double det = std::abs(m.determinant());
    CHECK(std::abs(fast - det) <= 1e-10 * std::max(1.0, det));
  }
}

TEST_CASE("full rate pipeline matches the independent determinant oracle") {
  StreetWorld world = default_world();
  Rng rng(66);
  PropagationParams params;
  const auto bss = two_bs();
  const auto rx = ArrayGeometry::ula(1);
  const Codebook cb = Codebook::uniform_angle_ula(ArrayGeometry::ula(16), 8);
  const double noise_w = dbm_to_watts(-84.0);
  const std::vector<double> powers = {1.0, 1.0};

  auto ues = spawn_episode(rng, world, 3, 8);
  LinkTracks tracks = make_link_tracks(2, 3);
  auto snap = realize_links(4242, bss, ues, params, rx, 1, tracks);
  omni_phase(bss, ues, snap, noise_w);
  const RateTable table = build_rate_table(bss, snap, cb, noise_w);

  Rng action_rng(67);
  for (int trial = 0; trial < 50; ++trial) {
    const auto actions = random_policy(action_rng, 2, 8);
    const auto out = beamformed_rates(table, actions);
    for (int k = 0; k < 3; ++k) {
      const double oracle =
          rate_by_determinant(snap.channels, powers, cb, actions, k,
                              snap.serving_bs[static_cast<size_t>(k)], noise_w);
      CHECK(out.per_ue[static_cast<size_t>(k)] ==
            doctest::Approx(oracle).epsilon(1e-10));
    }
  }
}

TEST_CASE("exhaustive search dominates every policy") {
  StreetWorld world = default_world();
  Rng rng(77);
  PropagationParams params;
  const auto bss = two_bs();
  const auto rx = ArrayGeometry::ula(1);
  const Codebook cb = Codebook::uniform_angle_ula(ArrayGeometry::ula(16), 8);
  const double noise_w = dbm_to_watts(-84.0);

  auto ues = spawn_episode(rng, world, 4, 8);
  LinkTracks tracks = make_link_tracks(2, 4);
  auto snap = realize_links(31337, bss, ues, params, rx, 1, tracks);
  omni_phase(bss, ues, snap, noise_w);
  const RateTable table = build_rate_table(bss, snap, cb, noise_w);

  const auto [best, best_sum] = exhaustive_best(table);
  REQUIRE(best.size() == 2);
  CHECK(beamformed_rates(table, best).sum == best_sum);

  Rng action_rng(78);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto actions = random_policy(action_rng, 2, 8);
    CHECK(beamformed_rates(table, actions).sum <= best_sum);
  }

  // J=1: the oracle is a max over the 8 single-BS candidates.
  const std::vector<BaseStation> one_bs = {bss[0]};
  LinkTracks tracks_one = make_link_tracks(1, 4);
  auto snap1 = realize_links(31338, one_bs, ues, params, rx, 1, tracks_one);
  omni_phase(one_bs, ues, snap1, noise_w);
  const RateTable table1 = build_rate_table(one_bs, snap1, cb, noise_w);
  const auto [best1, best_sum1] = exhaustive_best(table1);
  double manual_best = 0.0;
  for (int q = 0; q < 8; ++q)
    manual_best = std::max(manual_best, beamformed_rates(table1, {q}).sum);
  CHECK(best_sum1 == manual_best);
  CHECK(best_sum1 == beamformed_rates(table1, best1).sum);
}

TEST_CASE("sum_rate accumulates per-UE rates") {
  CHECK(sum_rate({1.0, 2.0, 3.0}) == 6.0);
  CHECK(sum_rate({}) == 0.0);
  // An all-inactive step has only zero entries.
  CHECK(sum_rate({0.0, 0.0}) == 0.0);
}

TEST_CASE("two-BS exhaustive search equals the 64-candidate maximum") {
  StreetWorld world = default_world();
  Rng rng(112);
  PropagationParams params;
  const auto bss = two_bs();
  const auto rx = ArrayGeometry::ula(1);
  const Codebook cb = Codebook::uniform_angle_ula(ArrayGeometry::ula(16), 8);
  const double noise_w = dbm_to_watts(-84.0);

  auto ues = spawn_episode(rng, world, 3, 8);
  LinkTracks tracks = make_link_tracks(2, 3);
  auto snap = realize_links(999, bss, ues, params, rx, 1, tracks);
  omni_phase(bss, ues, snap, noise_w);
  const RateTable table = build_rate_table(bss, snap, cb, noise_w);

  double manual_best = -1.0;
  int evaluations = 0;
  for (int q0 = 0; q0 < 8; ++q0)
    for (int q1 = 0; q1 < 8; ++q1) {
      manual_best = std::max(manual_best, beamformed_rates(table, {q0, q1}).sum);
      ++evaluations;
    }
  CHECK(evaluations == 64);
  const auto [best, best_sum] = exhaustive_best(table);
  CHECK(best_sum == manual_best);
}

TEST_CASE("exhaustive ties break to the lexicographically smallest tuple") {
  // No UEs associated: every joint action sums to zero.
  RateTable table;
  table.n_bs = 2;
  table.n_ue = 1;
  table.n_actions = 8;
  table.noise_w = 1.0;
  table.serving_bs = {-1};
  table.beam_power_w.assign(1 * 2 * 8, 0.0);
  const auto [best, best_sum] = exhaustive_best(table);
  CHECK(best == std::vector<int>{0, 0});
  CHECK(best_sum == 0.0);
}

TEST_CASE("victim rate is monotone in interferer beam power") {
  // Fixed numerator; swapping the interferer to a stronger beam can only
  // shrink the victim's rate.
  RateTable table;
  table.n_bs = 2;
  table.n_ue = 1;
  table.n_actions = 4;
  table.noise_w = 1e-9;
  table.serving_bs = {0};
  table.beam_power_w.assign(1 * 2 * 4, 0.0);
  Rng rng(88);
  for (int trial = 0; trial < 200; ++trial) {
    for (int q = 0; q < 4; ++q) {
      table.beam_power_w[q] = 5e-9;                       // serving, fixed
      table.beam_power_w[4 + q] = rng.uniform(0.0, 1e-8); // interferer
    }
    double prev_rate = 1e300;
    std::vector<int> order = {0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return table.beam_power_w[4 + a] < table.beam_power_w[4 + b];
    });
    for (int q : order) {
      const double rate = beamformed_rates(table, {0, q}).per_ue[0];
      CHECK(rate <= prev_rate);
      prev_rate = rate;
    }
  }
}

TEST_CASE("random policy is uniform and seed-stable") {
  Rng rng(99);
  std::vector<int> counts(8, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto a = random_policy(rng, 1, 8);
    counts[static_cast<size_t>(a[0])]++;
  }
  for (int q = 0; q < 8; ++q)
    CHECK(std::abs(counts[q] / static_cast<double>(n) - 0.125) < 0.01);

  Rng r1(5), r2(5);
  CHECK(random_policy(r1, 3, 8) == random_policy(r2, 3, 8));

  Rng r3(6);
  for (int i = 0; i < 100; ++i) CHECK(random_policy(r3, 1, 1)[0] == 0);
}

TEST_CASE("broadside orientation rotates the departure angle") {
  PropagationParams params;
  params.los_corr_distance_m = 0.0;
  const auto rx = ArrayGeometry::ula(1);
  std::vector<UserEquipment> ues(1);
  ues[0] = {0, {10.0, 0.0}, {2.0, 0.0}, 0, true, RateMemory(8)};

  std::vector<BaseStation> facing_x = {
      {0, {0.0, 0.0}, 1.0, ArrayGeometry::ula(16), 0.0}};
  std::vector<BaseStation> facing_y = {
      {0, {0.0, 0.0}, 1.0, ArrayGeometry::ula(16), kPi / 2.0}};

  LinkTracks t1 = make_link_tracks(1, 1), t2 = make_link_tracks(1, 1);
  const auto s1 = realize_links(5, facing_x, ues, params, rx, 1, t1);
  const auto s2 = realize_links(5, facing_y, ues, params, rx, 1, t2);
  // The UE sits due +x: on-broadside for the first array, -90 degrees off
  // for the rotated one (LOS at 10 m, so no scatter offset).
  CHECK(s1.links[0][0].aod_rad == doctest::Approx(0.0));
  CHECK(s2.links[0][0].aod_rad == doctest::Approx(-kPi / 2.0));
}

TEST_CASE("averaged pilots drop small-scale fading from the measurement") {
  const auto bss = two_bs();
  std::vector<UserEquipment> ues(1);
  ues[0] = {0, {5.0, 0.0}, {2.0, 0.0}, 0, true, RateMemory(3)};

  NetworkSnapshot snap;
  snap.links.assign(2, std::vector<LinkRealization>(1));
  snap.channels.assign(2, std::vector<Eigen::MatrixXcd>(1));
  snap.pilot_power_w.assign(2, std::vector<double>(1, 0.0));
  snap.serving_bs.assign(1, -1);
  snap.omni_rates.assign(1, 0.0);
  snap.bs_omni_rate.assign(2, 0.0);
  for (int j = 0; j < 2; ++j) {
    snap.links[j][0].gain = {0.3, 0.4};  // |gain|^2 = 0.25
    snap.links[j][0].shadow_factor = 2.0;
    snap.links[j][0].amplitude_path_loss = 1000.0;
  }

  omni_phase(bss, ues, snap, 1e-12, false);
  CHECK(snap.pilot_power_w[0][0] == doctest::Approx(0.25 * 2.0 / 1e6));
  omni_phase(bss, ues, snap, 1e-12, true);
  CHECK(snap.pilot_power_w[0][0] == doctest::Approx(2.0 / 1e6));
}

TEST_CASE("sin-spaced codebook keeps the phase-shifter constraint") {
  const auto geom = ArrayGeometry::ula(16);
  const Codebook cb = Codebook::uniform_sin_ula(geom, 8);
  REQUIRE(cb.size() == 8);
  for (int q = 0; q < 8; ++q) {
    CHECK(std::sin(cb.angles_rad[static_cast<size_t>(q)]) ==
          doctest::Approx(-1.0 + 2.0 * (q + 0.5) / 8.0));
    for (int i = 0; i < 16; ++i)
      CHECK(std::norm(cb.entries[static_cast<size_t>(q)](i)) ==
            doctest::Approx(1.0 / 16.0).epsilon(1e-14));
  }
}

TEST_CASE("association is a partial function over active UEs") {
  StreetWorld world = default_world();
  PropagationParams params;
  const auto bss = two_bs();
  const auto rx = ArrayGeometry::ula(1);
  Rng rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    auto ues = spawn_episode(rng, world, 6, 8);
    for (auto& ue : ues)
      if (rng.bernoulli(0.3)) ue.active = false;
    LinkTracks tracks = make_link_tracks(2, 6);
    auto snap = realize_links(derive_seed(500, static_cast<std::uint64_t>(trial)),
                              bss, ues, params, rx, 1, tracks);
    omni_phase(bss, ues, snap, dbm_to_watts(-84.0));
    for (int k = 0; k < 6; ++k) {
      if (ues[static_cast<size_t>(k)].active) {
        CHECK(snap.serving_bs[static_cast<size_t>(k)] >= 0);
        CHECK(snap.serving_bs[static_cast<size_t>(k)] < 2);
      } else {
        CHECK(snap.serving_bs[static_cast<size_t>(k)] == -1);
      }
    }
  }
}

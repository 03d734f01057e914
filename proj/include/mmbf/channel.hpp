// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>

#include "mmbf/array.hpp"
#include "mmbf/rng.hpp"

namespace mmbf {

enum class LinkState { Los, Nlos };

/// Large-scale propagation constants, dB domain, 1 m reference. The
/// correlation distances control how fast shadowing, the LOS state and
/// the small-scale gain decorrelate along a moving UE's track; 0 (the
/// default) redraws each of them independently every step.
struct PropagationParams {
  double kappa_los_db = 61.4;
  double alpha_los = 2.0;
  double kappa_nlos_db = 72.0;
  double alpha_nlos = 3.3;
  double sigma_v_los_db = 5.8;
  double sigma_v_nlos_db = 8.7;
  double mu_v_db = 0.0;
  double shadow_corr_distance_m = 0.0;
  double los_corr_distance_m = 0.0;
  double gain_corr_distance_m = 0.0;

  void validate() const;  // throws std::invalid_argument
};

/// Per-link large-scale memory carried along a UE trajectory within one
/// episode. Shadowing follows a distance-based AR(1) (Gudmundson-style)
/// in the dB domain; the LOS state persists with probability
/// exp(-moved/los_corr_distance) and is otherwise redrawn from the
/// distance-dependent LOS probability. Small-scale fading stays
/// independent per step.
struct LargeScaleTrack {
  bool initialized = false;
  LinkState state = LinkState::Los;
  double shadow_z = 0.0;  // standard-normal AR(1) innovation state
  std::complex<double> gain{1.0, 0.0};
  Eigen::Vector2d last_position{0.0, 0.0};
};

/// LOS probability at 2-D distance r (meters):
/// min(18/r, 1) * (1 - exp(-r/63)) + exp(-r/63), clamped to [0, 1].
/// Throws std::domain_error for r <= 0.
double los_probability(double r_m);

/// Power-domain path loss in dB: kappa + 10*alpha*log10(r). Distances
/// below 1 m clamp to the 1 m intercept.
double path_loss_db(double r_m, LinkState state, const PropagationParams& p);

/// Amplitude-domain loss, the square root of the linear power loss.
double amplitude_path_loss(double r_m, LinkState state, const PropagationParams& p);

/// Log-normal shadowing: 10*log10(v) ~ N(mu_db, sigma_db^2); returns the
/// linear power factor v.
double sample_shadowing(Rng& rng, double mu_db, double sigma_db);

/// One step of the correlated propagation process for a link whose UE is
/// now at `position`, distance r_m from the BS. Updates the track in
/// place and returns the step's LOS state, linear shadow factor and
/// complex gain. The marginals stay Bern(los_probability(r)), log-normal
/// and CN(0, 1) respectively.
struct LargeScaleDraw {
  LinkState state;
  double shadow_factor;
  std::complex<double> gain;
};
LargeScaleDraw advance_large_scale(Rng& rng, LargeScaleTrack& track, double r_m,
                                   const Eigen::Vector2d& position,
                                   const PropagationParams& params);

/// One propagation path between a BS and a UE.
struct LinkRealization {
  LinkState state = LinkState::Los;
  std::complex<double> gain{1.0, 0.0};  // small-scale complex gain
  double amplitude_path_loss = 1.0;     // >= 1, amplitude domain
  double shadow_factor = 1.0;           // linear power factor, > 0
  double aod_rad = 0.0;                 // departure angle at the BS
  double aoa_rad = 0.0;                 // arrival angle at the UE
};

/// Single-path narrowband channel:
///   H = sqrt(Nt*Nr) * (gain * sqrt(v) / p) * a_r(aoa) * a_t(aod)^H
/// An N_r x N_t rank-1 matrix with Frobenius norm
/// sqrt(Nt*Nr) * |gain| * sqrt(v) / p.
Eigen::MatrixXcd channel_matrix(const LinkRealization& link,
                                const ArrayGeometry& tx_geom,
                                const ArrayGeometry& rx_geom);

/// Received power factor under omni transmission: |gain|^2 * v / p^2.
double omni_power_gain(const LinkRealization& link);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace mmbf

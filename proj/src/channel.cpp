// SPDX-License-Identifier: Apache-2.0
#include "mmbf/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mmbf {

void PropagationParams::validate() const {
  if (!(alpha_los > 0.0) || !(alpha_nlos > 0.0))
    throw std::invalid_argument("path loss exponents must be > 0");
  if (sigma_v_los_db < 0.0 || sigma_v_nlos_db < 0.0)
    throw std::invalid_argument("shadowing std devs must be >= 0");
  if (shadow_corr_distance_m < 0.0 || los_corr_distance_m < 0.0 ||
      gain_corr_distance_m < 0.0)
    throw std::invalid_argument("correlation distances must be >= 0");
}

double los_probability(double r_m) {
  if (!(r_m > 0.0)) throw std::domain_error("los_probability requires r > 0");
  const double p = std::min(18.0 / r_m, 1.0) * (1.0 - std::exp(-r_m / 63.0)) +
                   std::exp(-r_m / 63.0);
  return std::clamp(p, 0.0, 1.0);
}

double path_loss_db(double r_m, LinkState state, const PropagationParams& p) {
  const double r = std::max(r_m, 1.0);
  const double kappa = state == LinkState::Los ? p.kappa_los_db : p.kappa_nlos_db;
  const double alpha = state == LinkState::Los ? p.alpha_los : p.alpha_nlos;
  return kappa + 10.0 * alpha * std::log10(r);
}

double amplitude_path_loss(double r_m, LinkState state, const PropagationParams& p) {
  return std::pow(10.0, path_loss_db(r_m, state, p) / 20.0);
}

double sample_shadowing(Rng& rng, double mu_db, double sigma_db) {
  if (sigma_db < 0.0) throw std::invalid_argument("shadowing sigma must be >= 0");
  const double v_db = rng.normal(mu_db, sigma_db);
  return std::pow(10.0, v_db / 10.0);
}

LargeScaleDraw advance_large_scale(Rng& rng, LargeScaleTrack& track, double r_m,
                                   const Eigen::Vector2d& position,
                                   const PropagationParams& params) {
  const double moved =
      track.initialized ? (position - track.last_position).norm() : 0.0;

  // LOS state: persist over the correlation distance, else redraw from
  // the distance-dependent probability. First contact draws directly.
  bool redraw_los = true;
  if (track.initialized && params.los_corr_distance_m > 0.0) {
    const double keep = std::exp(-moved / params.los_corr_distance_m);
    redraw_los = !rng.bernoulli(keep);
  }
  if (redraw_los)
    track.state = rng.bernoulli(los_probability(r_m)) ? LinkState::Los
                                                      : LinkState::Nlos;

  // Shadowing: distance-based AR(1) on a standard-normal state keeps the
  // per-step marginal N(mu, sigma^2) while correlating along the track.
  const double innovation = rng.normal(0.0, 1.0);
  if (track.initialized && params.shadow_corr_distance_m > 0.0) {
    const double rho = std::exp(-moved / params.shadow_corr_distance_m);
    track.shadow_z = rho * track.shadow_z +
                     std::sqrt(std::max(0.0, 1.0 - rho * rho)) * innovation;
  } else {
    track.shadow_z = innovation;
  }

  // Small-scale gain: AR(1) in the complex domain with a CN(0, 1)
  // stationary marginal.
  const std::complex<double> gain_innovation = rng.complex_normal(1.0);
  if (track.initialized && params.gain_corr_distance_m > 0.0) {
    const double rho = std::exp(-moved / params.gain_corr_distance_m);
    track.gain = rho * track.gain +
                 std::sqrt(std::max(0.0, 1.0 - rho * rho)) * gain_innovation;
  } else {
    track.gain = gain_innovation;
  }

  track.initialized = true;
  track.last_position = position;

  const double sigma_db = track.state == LinkState::Los ? params.sigma_v_los_db
                                                        : params.sigma_v_nlos_db;
  const double v_db = params.mu_v_db + sigma_db * track.shadow_z;
  return {track.state, std::pow(10.0, v_db / 10.0), track.gain};
}

Eigen::MatrixXcd channel_matrix(const LinkRealization& link,
                                const ArrayGeometry& tx_geom,
                                const ArrayGeometry& rx_geom) {
  const Eigen::VectorXcd at = array_response(tx_geom, link.aod_rad);
  const Eigen::VectorXcd ar = array_response(rx_geom, link.aoa_rad);
  const double nt = static_cast<double>(tx_geom.total_elements());
  const double nr = static_cast<double>(rx_geom.total_elements());
  const std::complex<double> coeff =
      std::sqrt(nt * nr) * link.gain * std::sqrt(link.shadow_factor) /
      link.amplitude_path_loss;
  return coeff * (ar * at.adjoint());
}

double omni_power_gain(const LinkRealization& link) {
  return std::norm(link.gain) * link.shadow_factor /
         (link.amplitude_path_loss * link.amplitude_path_loss);
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::remainder(a, two_pi);  // (-pi, pi] up to the -pi boundary
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

}  // namespace mmbf

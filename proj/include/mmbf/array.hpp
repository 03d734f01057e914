// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mmbf {

enum class ArrayKind { UlaY, UpaYZ };

/// Antenna panel description. Carrier frequency is abstracted away: only
/// the spacing/wavelength ratio enters the response.
struct ArrayGeometry {
  ArrayKind kind = ArrayKind::UlaY;
  int width = 1;   // elements along y
  int height = 1;  // elements along z (UPA only)
  double spacing_over_wavelength = 0.5;

  int total_elements() const { return width * height; }

  static ArrayGeometry ula(int n, double spacing_over_wavelength = 0.5);
  static ArrayGeometry upa(int w, int h, double spacing_over_wavelength = 0.5);
};

/// Steering vector of a y-axis ULA toward azimuth phi, measured from
/// broadside (+x). Element i carries phase 2*pi*(d/lambda)*i*sin(phi);
/// the vector has unit Euclidean norm.
Eigen::VectorXcd ula_response(const ArrayGeometry& geom, double phi);

/// Steering vector of a yz-plane UPA toward (phi, theta). Element (m, n),
/// m along y and n along z with m varying fastest, carries phase
/// 2*pi*(d/lambda)*(m*sin(phi)*cos(theta) + n*sin(phi)*sin(theta)).
Eigen::VectorXcd upa_response(const ArrayGeometry& geom, double phi, double theta);

/// Dispatches on the geometry kind; theta is ignored for ULAs.
Eigen::VectorXcd array_response(const ArrayGeometry& geom, double phi, double theta = 0.0);

/// Finite set of candidate beamforming vectors (quantized steering angles).
/// Every element of every entry has squared magnitude 1/N_t, the analog
/// phase-shifter constraint.
struct Codebook {
  std::vector<double> angles_rad;
  std::vector<Eigen::VectorXcd> entries;

  int size() const { return static_cast<int>(entries.size()); }

  /// n_beams quantized angles uniform over the ULA's unambiguous field of
  /// view: phi_q = -pi/2 + pi*(q+0.5)/n_beams.
  static Codebook uniform_angle_ula(const ArrayGeometry& geom, int n_beams);

  /// n_beams angles uniform in sin-space (beamspace design):
  /// sin(phi_q) = -1 + 2*(q+0.5)/n_beams. Crossover loss between
  /// neighboring beams stays flat across the field of view.
  static Codebook uniform_sin_ula(const ArrayGeometry& geom, int n_beams);
};

}  // namespace mmbf

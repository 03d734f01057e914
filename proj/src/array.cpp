// SPDX-License-Identifier: Apache-2.0
#include "mmbf/array.hpp"

#include <cmath>
#include <vector>
#include <numbers>
#include <stdexcept>

namespace mmbf {

namespace {

void check_geometry(const ArrayGeometry& g) {
  if (g.width < 1 || g.height < 1)
    throw std::invalid_argument("array element counts must be >= 1");
  if (!(g.spacing_over_wavelength > 0.0))
    throw std::invalid_argument("spacing_over_wavelength must be > 0");
}

}  // namespace

ArrayGeometry ArrayGeometry::ula(int n, double spacing_over_wavelength) {
  ArrayGeometry g{ArrayKind::UlaY, n, 1, spacing_over_wavelength};
  check_geometry(g);
  return g;
}

ArrayGeometry ArrayGeometry::upa(int w, int h, double spacing_over_wavelength) {
  ArrayGeometry g{ArrayKind::UpaYZ, w, h, spacing_over_wavelength};
  check_geometry(g);
  return g;
}

Eigen::VectorXcd ula_response(const ArrayGeometry& geom, double phi) {
  if (geom.kind != ArrayKind::UlaY)
    throw std::invalid_argument("ula_response requires a ULA geometry");
  const int n = geom.width;
  const double step = 2.0 * std::numbers::pi * geom.spacing_over_wavelength * std::sin(phi);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::VectorXcd a(n);
  for (int i = 0; i < n; ++i)
    a(i) = scale * std::complex<double>(std::cos(step * i), std::sin(step * i));
  return a;
}

Eigen::VectorXcd upa_response(const ArrayGeometry& geom, double phi, double theta) {
  if (geom.kind != ArrayKind::UpaYZ)
    throw std::invalid_argument("upa_response requires a UPA geometry");
  const int w = geom.width;
  const int h = geom.height;
  const double k = 2.0 * std::numbers::pi * geom.spacing_over_wavelength;
  const double y_step = k * std::sin(phi) * std::cos(theta);
  const double z_step = k * std::sin(phi) * std::sin(theta);
  const double scale = 1.0 / std::sqrt(static_cast<double>(w * h));
  Eigen::VectorXcd a(w * h);
  int idx = 0;
  for (int n = 0; n < h; ++n)
    for (int m = 0; m < w; ++m) {
      const double ph = y_step * m + z_step * n;
      a(idx++) = scale * std::complex<double>(std::cos(ph), std::sin(ph));
    }
  return a;
}

Eigen::VectorXcd array_response(const ArrayGeometry& geom, double phi, double theta) {
  return geom.kind == ArrayKind::UlaY ? ula_response(geom, phi)
                                      : upa_response(geom, phi, theta);
}

namespace {

Codebook codebook_from_angles(const ArrayGeometry& geom,
                              const std::vector<double>& angles) {
  Codebook cb;
  cb.angles_rad = angles;
  cb.entries.reserve(angles.size());
  for (double phi : angles) cb.entries.push_back(ula_response(geom, phi));
  return cb;
}

void check_codebook_args(const ArrayGeometry& geom, int n_beams) {
  if (geom.kind != ArrayKind::UlaY)
    throw std::invalid_argument("codebook construction requires a ULA geometry");
  if (n_beams < 1) throw std::invalid_argument("codebook size must be >= 1");
}

}  // namespace

Codebook Codebook::uniform_angle_ula(const ArrayGeometry& geom, int n_beams) {
  check_codebook_args(geom, n_beams);
  std::vector<double> angles;
  angles.reserve(n_beams);
  for (int q = 0; q < n_beams; ++q)
    angles.push_back(-std::numbers::pi / 2.0 +
                     std::numbers::pi * (q + 0.5) / n_beams);
  return codebook_from_angles(geom, angles);
}

Codebook Codebook::uniform_sin_ula(const ArrayGeometry& geom, int n_beams) {
  check_codebook_args(geom, n_beams);
  std::vector<double> angles;
  angles.reserve(n_beams);
  for (int q = 0; q < n_beams; ++q)
    angles.push_back(std::asin(-1.0 + 2.0 * (q + 0.5) / n_beams));
  return codebook_from_angles(geom, angles);
}

}  // namespace mmbf

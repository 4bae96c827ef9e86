// SPDX-License-Identifier: Apache-2.0
//
// Standard line-bundle and operator-field instances on the generated meshes.
#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "twosided/field.hpp"
#include "twosided/generators.hpp"
#include "twosided/line_bundle.hpp"

namespace twosided {

/// (cos(theta/2), e^{i phi} sin(theta/2)) for the point at polar angle
/// theta and azimuth phi: the tautological line over the Bloch sphere.
inline CMat bloch_spinor(double theta, double phi) {
  CMat z(2, 1);
  z(0, 0) = std::cos(theta / 2.0);
  z(1, 0) = std::polar(std::sin(theta / 2.0), phi);
  return z;
}

inline CMat bloch_spinor(const Point& p) {
  const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  const double theta = std::acos(std::clamp(p[2] / r, -1.0, 1.0));
  const double phi = std::atan2(p[1], p[0]);
  return bloch_spinor(theta, phi);
}

/// C^2-valued monopole section on a sphere mesh.
inline PhaseSection monopole_section(const Mesh& sphere, double rho = kDefaultOverlapFloor) {
  std::vector<CMat> vals;
  for (const auto& p : sphere.coords) vals.push_back(bloch_spinor(p));
  return make_section(sphere.complex, std::move(vals), rho);
}

/// Two M_n-valued sections of the monopole line: a north-gauge section damped
/// by (1 + z)/2 and a south-gauge section damped by (1 - z)/2.
inline std::pair<std::vector<CMat>, std::vector<CMat>> monopole_hemisphere_sections(const Mesh& sphere,
                                                                                   std::size_t n = 2) {
  std::vector<CMat> a, b;
  for (const auto& p : sphere.coords) {
    const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    const double z = p[2] / r;
    const double phi = std::atan2(p[1], p[0]);
    const CMat north = bloch_spinor(p);
    const CMat south = std::polar(1.0, -phi) * north;
    CMat x = CMat::Zero(n, n), y = CMat::Zero(n, n);
    x.row(0).head(2) = ((1.0 + z) / 2.0) * north.col(0).transpose();
    y.row(0).head(2) = ((1.0 - z) / 2.0) * south.col(0).transpose();
    a.push_back(std::move(x));
    b.push_back(std::move(y));
  }
  return {std::move(a), std::move(b)};
}

/// Parameter coordinates (i/m, j/n) for torus(m, n) and klein(m, n) vertices.
inline std::vector<std::array<double, 2>> grid_uv(std::size_t m, std::size_t n) {
  std::vector<std::array<double, 2>> uv;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) uv.push_back({static_cast<double>(i) / m, static_cast<double>(j) / n});
  return uv;
}

/// Pullback of the monopole line along the map collapsing the complement of a
/// parameter disc (centre c, radius r) to the south pole: degree one.
inline PhaseSection skyrmion_section(const ComplexPtr& base, const std::vector<std::array<double, 2>>& uv,
                                     std::array<double, 2> centre = {0.5, 0.5}, double radius = 0.4,
                                     double rho = kDefaultOverlapFloor) {
  std::vector<CMat> vals;
  for (const auto& [u, v] : uv) {
    const double du = u - centre[0], dv = v - centre[1];
    const double d = std::hypot(du, dv);
    const double theta = std::numbers::pi * std::min(d / radius, 1.0);
    vals.push_back(bloch_spinor(theta, std::atan2(dv, du)));
  }
  return make_section(base, std::move(vals), rho);
}

/// Trivial-bundle field on disc(k) whose norm decays linearly to zero on the
/// boundary label: phi_t = c(t) M_{s(t), r(t)} with c = 1 - max(|x|, |y|).
inline OperatorField decaying_disc_field(const Mesh& d, std::size_t n = 2) {
  std::vector<Pair> ps;
  for (const auto& p : d.coords) {
    const double x = p[0], y = p[1];
    const double c = std::max(0.0, 1.0 - std::max(std::abs(x), std::abs(y)));
    CMat s = identity(n);
    s(0, 1) = Complex(0.5 * x, 0.2);
    s(1, 0) = Complex(0.0, 0.3 * y);
    s *= std::polar(1.0, 2.0 * x + y);
    CMat r = identity(n);
    r(0, 1) = 0.3 * y;
    r(n - 1, 0) = Complex(0.1, 0.2 * x);
    s /= op_norm(s);
    r /= op_norm(r);
    ps.push_back({std::sqrt(c) * s, std::sqrt(c) * r});
  }
  return OperatorField::from_pairs(d.complex, ps);
}

}  // namespace twosided

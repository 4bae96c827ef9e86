// SPDX-License-Identifier: Apache-2.0
//
// Built-in meshes. Orientable surfaces come coherently oriented.
#pragma once

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include "twosided/complex.hpp"

namespace twosided {

using Point = std::array<double, 3>;

struct Mesh {
  ComplexPtr complex;
  std::vector<Point> coords;
};

namespace detail {

inline Point normalized(Point p) {
  const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  return {p[0] / r, p[1] / r, p[2] / r};
}

inline std::size_t grid_index(std::size_t i, std::size_t j, std::size_t cols) { return i * cols + j; }

}  // namespace detail

/// Icosahedral sphere, refined `levels` times by 4-to-1 midpoint splits
/// projected to the unit sphere. Triangles are oriented outward.
inline Mesh icosphere(int levels = 0) {
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Point> pts = {{-1, g, 0}, {1, g, 0},  {-1, -g, 0}, {1, -g, 0}, {0, -1, g},  {0, 1, g},
                            {0, -1, -g}, {0, 1, -g}, {g, 0, -1},  {g, 0, 1},  {-g, 0, -1}, {-g, 0, 1}};
  for (auto& p : pts) p = detail::normalized(p);
  std::vector<Triangle> tris = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < levels; ++l) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> mids;
    auto mid = [&](std::size_t a, std::size_t b) {
      auto key = std::minmax(a, b);
      auto it = mids.find(key);
      if (it != mids.end()) return it->second;
      const Point& p = pts[a];
      const Point& q = pts[b];
      pts.push_back(detail::normalized({p[0] + q[0], p[1] + q[1], p[2] + q[2]}));
      mids.emplace(key, pts.size() - 1);
      return pts.size() - 1;
    };
    std::vector<Triangle> next;
    for (const auto& t : tris) {
      const std::size_t ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  // enforce outward orientation
  for (auto& t : tris) {
    const Point &a = pts[t[0]], &b = pts[t[1]], &c = pts[t[2]];
    const Point u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
    const Point v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
    const Point nrm{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
    if (nrm[0] * (a[0] + b[0] + c[0]) + nrm[1] * (a[1] + b[1] + c[1]) + nrm[2] * (a[2] + b[2] + c[2]) < 0)
      std::swap(t[1], t[2]);
  }
  const std::size_t nv = pts.size();
  return {share(BaseComplex::from_triangles(nv, std::move(tris))), std::move(pts)};
}

/// m x n periodic grid. Coordinates are the embedding in R^3 (radii 2 and 1).
inline Mesh torus(std::size_t m = 6, std::size_t n = 6) {
  if (m < 3 || n < 3) fail(ErrorKind::InvalidInput, "torus grid needs at least 3 x 3 cells");
  std::vector<Triangle> tris;
  std::vector<Point> pts;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double u = 2.0 * std::numbers::pi * i / m, v = 2.0 * std::numbers::pi * j / n;
      pts.push_back({(2.0 + std::cos(v)) * std::cos(u), (2.0 + std::cos(v)) * std::sin(u), std::sin(v)});
      const std::size_t a = detail::grid_index(i, j, n), b = detail::grid_index((i + 1) % m, j, n),
                        c = detail::grid_index((i + 1) % m, (j + 1) % n, n),
                        d = detail::grid_index(i, (j + 1) % n, n);
      tris.push_back({a, b, c});
      tris.push_back({a, c, d});
    }
  return {share(BaseComplex::from_triangles(m * n, std::move(tris))), std::move(pts)};
}

/// Klein bottle: periodic in i, and row n is glued to row 0 with i -> -i.
/// Coordinates are the flat parameter square (z = 0).
inline Mesh klein(std::size_t m = 6, std::size_t n = 6) {
  if (m < 3 || n < 3) fail(ErrorKind::InvalidInput, "Klein grid needs at least 3 x 3 cells");
  auto idx = [&](std::size_t i, std::size_t j) {
    if (j == n) return detail::grid_index((m - i % m) % m, 0, n);
    return detail::grid_index(i % m, j, n);
  };
  std::vector<Triangle> tris;
  std::vector<Point> pts;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      pts.push_back({static_cast<double>(i) / m, static_cast<double>(j) / n, 0.0});
      const std::size_t a = idx(i, j), b = idx(i + 1, j), c = idx(i + 1, j + 1), d = idx(i, j + 1);
      tris.push_back({a, b, c});
      tris.push_back({a, c, d});
    }
  return {share(BaseComplex::from_triangles(m * n, std::move(tris))), std::move(pts)};
}

/// Square grid on [-1,1]^2 with k cells per side; outer ring labelled "boundary".
inline Mesh disc(std::size_t k = 6) {
  if (k < 1) fail(ErrorKind::InvalidInput, "disc needs at least one cell");
  const std::size_t s = k + 1;
  std::vector<Triangle> tris;
  std::vector<Point> pts;
  std::vector<std::size_t> boundary;
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j) {
      pts.push_back({-1.0 + 2.0 * i / k, -1.0 + 2.0 * j / k, 0.0});
      if (i == 0 || j == 0 || i == k || j == k) boundary.push_back(detail::grid_index(i, j, s));
      if (i < k && j < k) {
        const std::size_t a = detail::grid_index(i, j, s), b = detail::grid_index(i + 1, j, s),
                          c = detail::grid_index(i + 1, j + 1, s), d = detail::grid_index(i, j + 1, s);
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      }
    }
  Labels labels{{kBoundaryLabel, boundary}};
  return {share(BaseComplex::from_triangles(s * s, std::move(tris), {}, std::move(labels))), std::move(pts)};
}

/// Cycle graph with n vertices and no triangles.
inline Mesh cycle(std::size_t n = 6) {
  if (n < 3) fail(ErrorKind::InvalidInput, "cycle needs at least 3 vertices");
  std::vector<Edge> edges;
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) {
    edges.push_back({i, (i + 1) % n});
    const double t = 2.0 * std::numbers::pi * i / n;
    pts.push_back({std::cos(t), std::sin(t), 0.0});
  }
  return {share(BaseComplex(n, std::move(edges), {})), std::move(pts)};
}

/// Path graph 0 - 1 - ... - (n-1).
inline Mesh path(std::size_t n) {
  std::vector<Edge> edges;
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n) edges.push_back({i, i + 1});
    pts.push_back({static_cast<double>(i), 0.0, 0.0});
  }
  return {share(BaseComplex(n, std::move(edges), {})), std::move(pts)};
}

/// Carrier-averaged coordinates for a barycentric subdivision.
inline std::vector<Point> subdivided_coords(const std::vector<Point>& coords, const Subdivision& sd) {
  std::vector<Point> out;
  for (const auto& car : sd.carrier) {
    Point p{0, 0, 0};
    for (std::size_t v : car)
      for (int k = 0; k < 3; ++k) p[k] += coords[v][k] / static_cast<double>(car.size());
    out.push_back(p);
  }
  return out;
}

}  // namespace twosided

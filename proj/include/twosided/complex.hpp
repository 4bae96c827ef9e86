// SPDX-License-Identifier: Apache-2.0
//
// Finite oriented simplicial 2-complexes. Edges are stored with u < v; a
// triangle keeps the vertex order it was given and its boundary is
// [u->v] + [v->w] + [w->u], each term entering with sign +1 when it agrees with
// the stored edge direction. For a sorted triple this is (v,w) - (u,w) + (u,v).
#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "twosided/error.hpp"

namespace twosided {

using Edge = std::array<std::size_t, 2>;
using Triangle = std::array<std::size_t, 3>;
using Labels = std::map<std::string, std::vector<std::size_t>>;

inline constexpr const char* kBoundaryLabel = "boundary";

class BaseComplex {
 public:
  BaseComplex() = default;

  /// Validates: endpoints distinct and in range, no duplicate simplices, every
  /// triangle edge present. Edge endpoints are reordered to u < v.
  BaseComplex(std::size_t vertices, std::vector<Edge> edges, std::vector<Triangle> triangles,
              Labels labels = {})
      : vertex_count_(vertices), edges_(std::move(edges)), triangles_(std::move(triangles)),
        labels_(std::move(labels)) {
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      auto& [u, v] = edges_[e];
      if (u >= vertex_count_ || v >= vertex_count_)
        fail(ErrorKind::InvalidComplex, "edge endpoint out of range", {e});
      if (u == v) fail(ErrorKind::InvalidComplex, "degenerate edge", {e});
      if (u > v) std::swap(u, v);
      if (!edge_index_.emplace(key(u, v), e).second)
        fail(ErrorKind::InvalidComplex, "duplicate edge", {e});
    }
    std::unordered_map<std::uint64_t, std::size_t> seen;
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
      const auto& tri = triangles_[t];
      for (std::size_t x : tri)
        if (x >= vertex_count_) fail(ErrorKind::InvalidComplex, "triangle vertex out of range", {t});
      if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
        fail(ErrorKind::InvalidComplex, "degenerate triangle", {t});
      for (int i = 0; i < 3; ++i)
        if (!edge(tri[i], tri[(i + 1) % 3]))
          fail(ErrorKind::InvalidComplex, "triangle edge missing", {t});
      Triangle s = tri;
      std::sort(s.begin(), s.end());
      const std::uint64_t k = (static_cast<std::uint64_t>(s[0]) * vertex_count_ + s[1]) * vertex_count_ + s[2];
      if (!seen.emplace(k, t).second) fail(ErrorKind::InvalidComplex, "duplicate triangle", {t});
    }
    for (const auto& [name, vs] : labels_)
      for (std::size_t v : vs)
        if (v >= vertex_count_) fail(ErrorKind::InvalidComplex, "label '" + name + "' out of range", {v});
  }

  /// Builds the edge set from the triangles plus any extra free edges.
  static BaseComplex from_triangles(std::size_t vertices, std::vector<Triangle> triangles,
                                    std::vector<Edge> extra_edges = {}, Labels labels = {}) {
    std::vector<Edge> edges;
    std::unordered_map<std::uint64_t, bool> have;
    auto add = [&](std::size_t u, std::size_t v) {
      if (u > v) std::swap(u, v);
      if (have.emplace(static_cast<std::uint64_t>(u) * vertices + v, true).second) edges.push_back({u, v});
    };
    for (const auto& t : triangles)
      for (int i = 0; i < 3; ++i) add(t[i], t[(i + 1) % 3]);
    for (const auto& e : extra_edges) add(e[0], e[1]);
    return BaseComplex(vertices, std::move(edges), std::move(triangles), std::move(labels));
  }

  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const Labels& labels() const { return labels_; }

  const std::vector<std::size_t>* label(const std::string& name) const {
    auto it = labels_.find(name);
    return it == labels_.end() ? nullptr : &it->second;
  }

  std::optional<std::size_t> edge(std::size_t u, std::size_t v) const {
    if (u > v) std::swap(u, v);
    auto it = edge_index_.find(key(u, v));
    if (it == edge_index_.end()) return std::nullopt;
    return it->second;
  }

  /// Index of the edge and the sign of the oriented traversal u -> v.
  std::pair<std::size_t, int> oriented_edge(std::size_t u, std::size_t v) const {
    auto e = edge(u, v);
    if (!e) fail(ErrorKind::InvalidComplex, "no such edge");
    return {*e, u < v ? 1 : -1};
  }

  std::vector<std::vector<std::size_t>> adjacency() const {
    std::vector<std::vector<std::size_t>> adj(vertex_count_);
    for (const auto& [u, v] : edges_) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    return adj;
  }

  long euler_characteristic() const {
    return static_cast<long>(vertex_count_) - static_cast<long>(edges_.size()) +
           static_cast<long>(triangles_.size());
  }

 private:
  std::uint64_t key(std::size_t u, std::size_t v) const {
    return static_cast<std::uint64_t>(u) * std::max<std::size_t>(vertex_count_, 1) + v;
  }

  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<Triangle> triangles_;
  Labels labels_;
  std::unordered_map<std::uint64_t, std::size_t> edge_index_;
};

using ComplexPtr = std::shared_ptr<const BaseComplex>;

inline ComplexPtr share(BaseComplex c) { return std::make_shared<const BaseComplex>(std::move(c)); }

/// Induced subcomplex together with its vertex map into the parent.
struct Subcomplex {
  ComplexPtr complex;
  std::vector<std::size_t> parent_vertex;

  std::size_t size() const { return parent_vertex.size(); }
};

inline Subcomplex subcomplex(const BaseComplex& c, const std::function<bool(std::size_t)>& keep) {
  std::vector<long> child(c.vertex_count(), -1);
  Subcomplex sub;
  for (std::size_t v = 0; v < c.vertex_count(); ++v)
    if (keep(v)) {
      child[v] = static_cast<long>(sub.parent_vertex.size());
      sub.parent_vertex.push_back(v);
    }
  std::vector<Edge> edges;
  for (const auto& [u, v] : c.edges())
    if (child[u] >= 0 && child[v] >= 0)
      edges.push_back({static_cast<std::size_t>(child[u]), static_cast<std::size_t>(child[v])});
  std::vector<Triangle> tris;
  for (const auto& t : c.triangles())
    if (child[t[0]] >= 0 && child[t[1]] >= 0 && child[t[2]] >= 0)
      tris.push_back({static_cast<std::size_t>(child[t[0]]), static_cast<std::size_t>(child[t[1]]),
                      static_cast<std::size_t>(child[t[2]])});
  Labels labels;
  for (const auto& [name, vs] : c.labels()) {
    std::vector<std::size_t> kept;
    for (std::size_t v : vs)
      if (child[v] >= 0) kept.push_back(static_cast<std::size_t>(child[v]));
    labels.emplace(name, std::move(kept));
  }
  sub.complex = share(BaseComplex(sub.parent_vertex.size(), std::move(edges), std::move(tris), std::move(labels)));
  return sub;
}

inline Subcomplex subcomplex(const BaseComplex& c, const std::vector<std::size_t>& vertices) {
  std::vector<bool> in(c.vertex_count(), false);
  for (std::size_t v : vertices) {
    if (v >= c.vertex_count()) fail(ErrorKind::NotASubcomplex, "vertex out of range", {v});
    in[v] = true;
  }
  return subcomplex(c, [&](std::size_t v) { return in[v]; });
}

/// Checks that the vertex map sends every simplex of `sub` to a simplex of `parent`.
inline void check_subcomplex(const BaseComplex& parent, const Subcomplex& sub) {
  const BaseComplex& s = *sub.complex;
  if (sub.parent_vertex.size() != s.vertex_count())
    fail(ErrorKind::NotASubcomplex, "vertex map size differs from subcomplex size");
  std::vector<bool> used(parent.vertex_count(), false);
  for (std::size_t v = 0; v < sub.parent_vertex.size(); ++v) {
    const std::size_t p = sub.parent_vertex[v];
    if (p >= parent.vertex_count() || used[p]) fail(ErrorKind::NotASubcomplex, "bad vertex map", {v});
    used[p] = true;
  }
  for (std::size_t e = 0; e < s.edge_count(); ++e)
    if (!parent.edge(sub.parent_vertex[s.edges()[e][0]], sub.parent_vertex[s.edges()[e][1]]))
      fail(ErrorKind::NotASubcomplex, "edge not present in parent", {e});
  std::set<Triangle> have;
  for (Triangle q : parent.triangles()) {
    std::sort(q.begin(), q.end());
    have.insert(q);
  }
  for (std::size_t t = 0; t < s.triangle_count(); ++t) {
    const auto& tri = s.triangles()[t];
    Triangle p{sub.parent_vertex[tri[0]], sub.parent_vertex[tri[1]], sub.parent_vertex[tri[2]]};
    std::sort(p.begin(), p.end());
    if (!have.count(p)) fail(ErrorKind::NotASubcomplex, "triangle not present in parent", {t});
  }
}

/// Connected components by union-find; returns component id per vertex.
inline std::vector<std::size_t> components(const BaseComplex& c) {
  std::vector<std::size_t> parent(c.vertex_count());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [u, v] : c.edges()) parent[find(u)] = find(v);
  std::map<std::size_t, std::size_t> ids;
  std::vector<std::size_t> out(c.vertex_count());
  for (std::size_t v = 0; v < c.vertex_count(); ++v) out[v] = ids.emplace(find(v), ids.size()).first->second;
  return out;
}

/// Barycentric subdivision. `carrier[v]` lists the original vertices spanning
/// the simplex whose barycenter is new vertex v. Triangle orientation follows
/// the parent triangle.
struct Subdivision {
  ComplexPtr complex;
  std::vector<std::vector<std::size_t>> carrier;
};

inline Subdivision barycentric_subdivision(const BaseComplex& c) {
  Subdivision out;
  const std::size_t nv = c.vertex_count();
  for (std::size_t v = 0; v < nv; ++v) out.carrier.push_back({v});
  std::vector<std::size_t> mid(c.edge_count());
  for (std::size_t e = 0; e < c.edge_count(); ++e) {
    mid[e] = out.carrier.size();
    out.carrier.push_back({c.edges()[e][0], c.edges()[e][1]});
  }
  std::vector<Triangle> tris;
  std::vector<Edge> extra;
  for (const auto& t : c.triangles()) {
    const std::size_t b = out.carrier.size();
    out.carrier.push_back({t[0], t[1], t[2]});
    for (int i = 0; i < 3; ++i) {
      const std::size_t x = t[i], y = t[(i + 1) % 3];
      const std::size_t m = mid[*c.edge(x, y)];
      tris.push_back({x, m, b});
      tris.push_back({m, y, b});
    }
  }
  for (std::size_t e = 0; e < c.edge_count(); ++e) {
    extra.push_back({c.edges()[e][0], mid[e]});
    extra.push_back({mid[e], c.edges()[e][1]});
  }
  Labels labels;
  for (const auto& [name, vs] : c.labels()) {
    std::vector<bool> in(nv, false);
    for (std::size_t v : vs) in[v] = true;
    std::vector<std::size_t> kept(vs.begin(), vs.end());
    // a new vertex inherits a label when its whole carrier carries it
    for (std::size_t v = nv; v < out.carrier.size(); ++v)
      if (std::all_of(out.carrier[v].begin(), out.carrier[v].end(), [&](std::size_t p) { return in[p]; }))
        kept.push_back(v);
    labels.emplace(name, std::move(kept));
  }
  out.complex = share(BaseComplex::from_triangles(out.carrier.size(), std::move(tris), std::move(extra), std::move(labels)));
  return out;
}

}  // namespace twosided

// SPDX-License-Identifier: Apache-2.0
//
// Simplicial cochains with integer coefficients on a 2-complex:
// coboundary matrices, cohomology groups, coboundary tests with witnesses and
// class coordinates of 2-cochains.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "twosided/complex.hpp"
#include "twosided/smith.hpp"

namespace twosided {

/// delta^0 (edges x vertices) or delta^1 (triangles x edges).
inline SparseIntMatrix coboundary_matrix(const BaseComplex& c, int k) {
  if (k == 0) {
    SparseIntMatrix m(c.edge_count(), c.vertex_count());
    for (std::size_t e = 0; e < c.edge_count(); ++e) {
      m.add(e, c.edges()[e][0], -1);
      m.add(e, c.edges()[e][1], 1);
    }
    return m;
  }
  if (k == 1) {
    SparseIntMatrix m(c.triangle_count(), c.edge_count());
    for (std::size_t t = 0; t < c.triangle_count(); ++t) {
      const auto& tri = c.triangles()[t];
      for (int i = 0; i < 3; ++i) {
        const auto [e, s] = c.oriented_edge(tri[i], tri[(i + 1) % 3]);
        m.add(t, e, s);
      }
    }
    return m;
  }
  fail(ErrorKind::InvalidInput, "coboundary degree must be 0 or 1");
}

struct CohomologyGroup {
  int degree = 0;
  std::size_t free_rank = 0;
  std::vector<BigInt> torsion;  // invariant factors > 1

  bool is_zero() const { return free_rank == 0 && torsion.empty(); }
  std::string describe() const {
    std::string s;
    if (free_rank > 0) s = "Z" + (free_rank > 1 ? "^" + std::to_string(free_rank) : std::string());
    for (const auto& t : torsion) s += (s.empty() ? "" : " + ") + ("Z/" + t.str());
    return s.empty() ? "0" : s;
  }
};

struct CohomologyClass {
  CohomologyGroup group;
  std::vector<BigInt> torsion_coords;
  std::vector<BigInt> free_coords;

  bool is_zero() const {
    for (const auto& x : torsion_coords)
      if (x != 0) return false;
    for (const auto& x : free_coords)
      if (x != 0) return false;
    return true;
  }
};

struct CoboundaryResult {
  bool is_coboundary = false;
  std::optional<std::vector<std::int64_t>> witness;  // m with delta m = w
};

/// Cached reductions of the coboundary maps of one complex.
class CochainComplex {
 public:
  explicit CochainComplex(ComplexPtr c) : c_(std::move(c)) {
    d0_ = coboundary_matrix(*c_, 0);
    d1_ = coboundary_matrix(*c_, 1);
  }

  const BaseComplex& complex() const { return *c_; }
  const SparseIntMatrix& coboundary(int k) const { return k == 0 ? d0_ : d1_; }

  const ReducedSystem& reduced(int k) const {
    auto& slot = k == 0 ? r0_ : r1_;
    if (!slot) slot = std::make_shared<ReducedSystem>(coboundary(k));
    return *slot;
  }

  CohomologyGroup group(int k) const {
    CohomologyGroup g;
    g.degree = k;
    const std::size_t nv = c_->vertex_count(), ne = c_->edge_count(), nt = c_->triangle_count();
    switch (k) {
      case 0:
        g.free_rank = nv - reduced(0).rank();
        break;
      case 1:
        g.free_rank = ne - reduced(1).rank() - reduced(0).rank();
        g.torsion = reduced(0).torsion();
        break;
      case 2:
        g.free_rank = nt - reduced(1).rank();
        g.torsion = reduced(1).torsion();
        break;
      default:
        fail(ErrorKind::InvalidInput, "cohomology degree must be 0, 1 or 2");
    }
    return g;
  }

  CoboundaryResult is_coboundary(const std::vector<std::int64_t>& w) const {
    const auto sol = reduced(1).solve(to_big(w, c_->triangle_count()));
    CoboundaryResult r;
    r.is_coboundary = sol.solvable;
    if (sol.solvable) {
      std::vector<std::int64_t> m;
      for (const auto& x : sol.x) m.push_back(to_int64(x));
      r.witness = std::move(m);
    }
    return r;
  }

  /// Coordinates of a 2-cochain (always a cocycle here) in H^2.
  CohomologyClass class_of(const std::vector<std::int64_t>& w) const {
    const auto sol = reduced(1).solve(to_big(w, c_->triangle_count()));
    return {group(2), sol.torsion_coords, sol.free_coords};
  }

 private:
  static std::vector<BigInt> to_big(const std::vector<std::int64_t>& w, std::size_t expect) {
    if (w.size() != expect) fail(ErrorKind::DimensionMismatch, "cochain length differs from triangle count");
    return std::vector<BigInt>(w.begin(), w.end());
  }

  ComplexPtr c_;
  SparseIntMatrix d0_, d1_;
  mutable std::shared_ptr<ReducedSystem> r0_, r1_;
};

inline CohomologyGroup cohomology(const ComplexPtr& c, int k) { return CochainComplex(c).group(k); }

inline CoboundaryResult is_coboundary(const ComplexPtr& c, const std::vector<std::int64_t>& w) {
  return CochainComplex(c).is_coboundary(w);
}

}  // namespace twosided

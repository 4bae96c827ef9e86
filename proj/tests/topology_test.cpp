// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "twosided/cohomology.hpp"
#include "twosided/generators.hpp"

using namespace twosided;

namespace {

std::vector<Mesh> battery() {
  return {icosphere(0), icosphere(1), torus(4, 5), klein(4, 5), klein(6, 6), disc(4), cycle(7), path(5)};
}

// Union-find component count, written independently of components().
std::size_t count_components(const BaseComplex& c) {
  std::vector<std::size_t> p(c.vertex_count());
  std::iota(p.begin(), p.end(), 0);
  auto root = [&](std::size_t x) {
    while (p[x] != x) x = p[x];
    return x;
  };
  std::size_t count = c.vertex_count();
  for (const auto& e : c.edges()) {
    const std::size_t a = root(e[0]), b = root(e[1]);
    if (a != b) {
      p[a] = b;
      --count;
    }
  }
  return count;
}

BaseComplex single_triangle() { return BaseComplex::from_triangles(3, {{0, 1, 2}}); }

}  // namespace

TEST(Complex, ValidationErrors) {
  EXPECT_THROW(BaseComplex(2, {{0, 0}}, {}), Error);
  EXPECT_THROW(BaseComplex(2, {{0, 1}, {1, 0}}, {}), Error);
  EXPECT_THROW(BaseComplex(3, {{0, 1}, {1, 2}}, {{0, 1, 2}}), Error);
  EXPECT_THROW(BaseComplex(2, {{0, 5}}, {}), Error);
  EXPECT_NO_THROW(single_triangle());
}

TEST(Complex, GeneratorCounts) {
  const auto ico = icosphere(0);
  EXPECT_EQ(ico.complex->vertex_count(), 12u);
  EXPECT_EQ(ico.complex->edge_count(), 30u);
  EXPECT_EQ(ico.complex->triangle_count(), 20u);
  EXPECT_EQ(ico.complex->euler_characteristic(), 2);
  EXPECT_EQ(icosphere(2).complex->euler_characteristic(), 2);
  EXPECT_EQ(torus(4, 5).complex->euler_characteristic(), 0);
  EXPECT_EQ(klein(4, 5).complex->euler_characteristic(), 0);
  EXPECT_EQ(disc(3).complex->euler_characteristic(), 1);
  EXPECT_EQ(disc(3).complex->label(kBoundaryLabel)->size(), 12u);
}

TEST(Coboundary, ShapesAndSquareZero) {
  const auto ico = icosphere(0);
  const auto d0 = coboundary_matrix(*ico.complex, 0);
  const auto d1 = coboundary_matrix(*ico.complex, 1);
  EXPECT_EQ(d0.rows, 30u);
  EXPECT_EQ(d0.cols, 12u);
  EXPECT_EQ(d1.rows, 20u);
  EXPECT_EQ(d1.cols, 30u);
  for (const auto& m : battery())
    EXPECT_EQ(coboundary_matrix(*m.complex, 1).compose(coboundary_matrix(*m.complex, 0)).nonzeros(), 0u);
  const auto tri = single_triangle();
  EXPECT_EQ(coboundary_matrix(tri, 1).compose(coboundary_matrix(tri, 0)).nonzeros(), 0u);
  EXPECT_EQ(coboundary_matrix(*cycle(5).complex, 1).rows, 0u);
}

TEST(Coboundary, SortedTriangleBoundaryConvention) {
  // (u,v,w) sorted: boundary (v,w) - (u,w) + (u,v)
  const auto tri = single_triangle();
  const IntMatrix d1 = coboundary_matrix(tri, 1).dense();
  EXPECT_EQ(d1(0, *tri.edge(1, 2)), 1);
  EXPECT_EQ(d1(0, *tri.edge(0, 2)), -1);
  EXPECT_EQ(d1(0, *tri.edge(0, 1)), 1);
}

TEST(Smith, Examples) {
  const auto id = smith_normal_form(IntMatrix::identity(3));
  EXPECT_EQ(id.D, IntMatrix::identity(3));
  const auto s = smith_normal_form(IntMatrix{{2, 0}, {0, 3}});
  ASSERT_EQ(s.invariant_factors.size(), 2u);
  EXPECT_EQ(s.invariant_factors[0], 1);
  EXPECT_EQ(s.invariant_factors[1], 6);
  const auto z = smith_normal_form(IntMatrix(2, 3));
  EXPECT_EQ(z.D, IntMatrix(2, 3));
  EXPECT_EQ(z.rank, 0u);
}

TEST(Smith, RandomMatricesVerifiedAgainstDeterminantalDivisors) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coeff(-6, 6);
  for (int k = 0; k < 60; ++k) {
    const std::size_t r = 1 + k % 4, c = 1 + (k / 4) % 4;
    IntMatrix a(r, c);
    for (auto& x : a.data) x = coeff(rng);
    const auto s = smith_normal_form(a);
    EXPECT_EQ(s.U * a * s.V, s.D);
    EXPECT_EQ(abs(determinant(s.U)), 1);
    EXPECT_EQ(abs(determinant(s.V)), 1);
    for (std::size_t i = 0; i + 1 < s.rank; ++i) EXPECT_EQ(s.invariant_factors[i + 1] % s.invariant_factors[i], 0);
    // oracle: product of invariant factors of a square full-rank matrix = |det|
    if (r == c && s.rank == r) {
      BigInt prod = 1;
      for (const auto& d : s.invariant_factors) prod *= d;
      EXPECT_EQ(prod, abs(determinant(a)));
    }
  }
}

TEST(Smith, LargeEntriesDoNotOverflow) {
  IntMatrix a{{4000000000LL, 6000000000LL}, {6000000000LL, 4000000000LL}};
  const auto s = smith_normal_form(a * a * a);
  EXPECT_EQ(s.U * (a * a * a) * s.V, s.D);
}

TEST(ReducedSystem, AgreesWithDenseSmith) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> coeff(-2, 2);
  for (int k = 0; k < 40; ++k) {
    const std::size_t r = 2 + k % 5, c = 2 + (k / 5) % 5;
    SparseIntMatrix a(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        if (int v = coeff(rng); v != 0) a.add(i, j, v);
    const ReducedSystem red(a);
    const auto dense = smith_normal_form(a.dense());
    EXPECT_EQ(red.rank(), dense.rank);
    std::vector<BigInt> t1 = red.torsion(), t2;
    for (const auto& d : dense.invariant_factors)
      if (d > 1) t2.push_back(d);
    EXPECT_EQ(t1, t2);
    // solvability of A x = A y, witness reproduces
    std::vector<BigInt> y(c);
    for (auto& v : y) v = coeff(rng);
    const auto b = a.apply(y);
    const auto sol = red.solve(b);
    ASSERT_TRUE(sol.solvable);
    EXPECT_EQ(a.apply(sol.x), b);
  }
}

TEST(Cohomology, SphereCircleKleinTorusDisc) {
  const auto ico = icosphere(0).complex;
  auto h2 = cohomology(ico, 2);
  EXPECT_EQ(h2.free_rank, 1u);
  EXPECT_TRUE(h2.torsion.empty());
  EXPECT_EQ(cohomology(ico, 1).free_rank, 0u);

  const auto circ = cycle(6).complex;
  EXPECT_TRUE(cohomology(circ, 2).is_zero());
  EXPECT_EQ(cohomology(circ, 1).free_rank, 1u);

  for (const auto& m : {klein(4, 5), klein(6, 6)}) {
    const auto k2 = cohomology(m.complex, 2);
    EXPECT_EQ(k2.free_rank, 0u);
    ASSERT_EQ(k2.torsion.size(), 1u);
    EXPECT_EQ(k2.torsion[0], 2);
    EXPECT_EQ(cohomology(m.complex, 1).free_rank, 1u);
  }
  const auto t = torus(4, 5).complex;
  EXPECT_EQ(cohomology(t, 2).free_rank, 1u);
  EXPECT_EQ(cohomology(t, 1).free_rank, 2u);
  EXPECT_TRUE(cohomology(disc(4).complex, 2).is_zero());
  EXPECT_TRUE(cohomology(disc(4).complex, 1).is_zero());
}

TEST(Cohomology, H0MatchesUnionFind) {
  for (const auto& m : battery()) EXPECT_EQ(cohomology(m.complex, 0).free_rank, count_components(*m.complex));
  // disjoint union of a disc and a cycle
  const auto d = disc(2).complex;
  std::vector<Edge> edges = d->edges();
  std::vector<Triangle> tris = d->triangles();
  const std::size_t off = d->vertex_count();
  for (std::size_t i = 0; i < 4; ++i) edges.push_back({off + i, off + (i + 1) % 4});
  const auto u = share(BaseComplex(off + 5, edges, tris));
  EXPECT_EQ(cohomology(u, 0).free_rank, 3u);
  EXPECT_EQ(count_components(*u), 3u);
}

TEST(IsCoboundary, Examples) {
  const auto ico = icosphere(0).complex;
  auto r = is_coboundary(ico, std::vector<std::int64_t>(20, 0));
  EXPECT_TRUE(r.is_coboundary);
  ASSERT_TRUE(r.witness);
  for (auto x : *r.witness) EXPECT_EQ(x, 0);

  std::vector<std::int64_t> w(20, 0);
  w[7] = 1;
  EXPECT_FALSE(is_coboundary(ico, w).is_coboundary);
  const CochainComplex cc(ico);
  const auto cls = cc.class_of(w);
  ASSERT_EQ(cls.free_coords.size(), 1u);
  EXPECT_EQ(abs(cls.free_coords[0]), 1);

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coeff(-5, 5);
  const auto dc = disc(5).complex;
  std::vector<std::int64_t> wd(dc->triangle_count());
  for (auto& x : wd) x = coeff(rng);
  const auto rd = is_coboundary(dc, wd);
  ASSERT_TRUE(rd.is_coboundary);
  EXPECT_EQ(coboundary_matrix(*dc, 1).apply(*rd.witness), wd);
}

TEST(IsCoboundary, WitnessReproducesOnEveryComplex) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> coeff(-3, 3);
  for (const auto& m : battery()) {
    const auto& c = *m.complex;
    if (c.triangle_count() == 0) continue;
    std::vector<std::int64_t> m1(c.edge_count());
    for (auto& x : m1) x = coeff(rng);
    const auto w = coboundary_matrix(c, 1).apply(m1);
    const auto r = is_coboundary(m.complex, w);
    ASSERT_TRUE(r.is_coboundary);
    EXPECT_EQ(coboundary_matrix(c, 1).apply(*r.witness), w);
  }
}

TEST(IsCoboundary, SphereDetectsTotalDegree) {
  const auto ico = icosphere(1).complex;
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> coeff(-3, 3);
  const CochainComplex cc(ico);
  for (int k = 0; k < 10; ++k) {
    std::vector<std::int64_t> w(ico->triangle_count());
    std::int64_t total = 0;
    for (auto& x : w) total += (x = coeff(rng));
    EXPECT_EQ(cc.is_coboundary(w).is_coboundary, total == 0);
    EXPECT_EQ(abs(cc.class_of(w).free_coords.at(0)), std::abs(total));
  }
}

TEST(IsCoboundary, KleinTorsionParity) {
  const auto k = klein(4, 5).complex;
  const CochainComplex cc(k);
  std::vector<std::int64_t> w(k->triangle_count(), 0);
  w[3] = 1;
  const auto cls = cc.class_of(w);
  ASSERT_EQ(cls.torsion_coords.size(), 1u);
  EXPECT_EQ(cls.torsion_coords[0], 1);
  w[3] = 2;
  EXPECT_TRUE(cc.is_coboundary(w).is_coboundary);
}

TEST(Subcomplex, Examples) {
  const auto ico = icosphere(0);
  const auto full = subcomplex(*ico.complex, [](std::size_t) { return true; });
  EXPECT_EQ(full.complex->vertex_count(), 12u);
  EXPECT_EQ(full.complex->edge_count(), 30u);
  EXPECT_EQ(full.complex->triangle_count(), 20u);
  const auto none = subcomplex(*ico.complex, [](std::size_t) { return false; });
  EXPECT_EQ(none.complex->vertex_count(), 0u);
  const auto punctured = subcomplex(*ico.complex, [](std::size_t v) { return v != 0; });
  EXPECT_TRUE(cohomology(punctured.complex, 2).is_zero());
  EXPECT_EQ(cohomology(punctured.complex, 0).free_rank, 1u);
  EXPECT_NO_THROW(check_subcomplex(*ico.complex, punctured));
}

TEST(Subdivision, PreservesCohomologyAndOrientation) {
  for (const auto& m : {icosphere(0), torus(3, 4), klein(4, 5), disc(2)}) {
    const auto sd = barycentric_subdivision(*m.complex);
    EXPECT_EQ(sd.complex->euler_characteristic(), m.complex->euler_characteristic());
    const auto a = cohomology(m.complex, 2), b = cohomology(sd.complex, 2);
    EXPECT_EQ(a.free_rank, b.free_rank);
    EXPECT_EQ(a.torsion, b.torsion);
  }
  // coherent orientation survives: the all-ones cochain is still a generator on the sphere
  const auto sd = barycentric_subdivision(*icosphere(0).complex);
  const CochainComplex cc(sd.complex);
  std::vector<std::int64_t> all(sd.complex->triangle_count(), 1);
  EXPECT_EQ(abs(cc.class_of(all).free_coords.at(0)), static_cast<long>(sd.complex->triangle_count()));
}

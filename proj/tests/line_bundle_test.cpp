// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "twosided/line_bundle.hpp"
#include "twosided/random.hpp"
#include "twosided/scenarios.hpp"

using namespace twosided;

namespace {

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidInput;
}

// Signed solid angle of a spherical triangle (Van Oosterom-Strackee).
double solid_angle(const Point& a, const Point& b, const Point& c) {
  auto dot = [](const Point& x, const Point& y) { return x[0] * y[0] + x[1] * y[1] + x[2] * y[2]; };
  auto unit = [&](const Point& x) {
    const double r = std::sqrt(dot(x, x));
    return Point{x[0] / r, x[1] / r, x[2] / r};
  };
  const Point u = unit(a), v = unit(b), w = unit(c);
  const Point vxw{v[1] * w[2] - v[2] * w[1], v[2] * w[0] - v[0] * w[2], v[0] * w[1] - v[1] * w[0]};
  return 2.0 * std::atan2(dot(u, vxw), 1.0 + dot(u, v) + dot(v, w) + dot(w, u));
}

// Degree of the vertex map into S^2 from summed signed solid angles.
long degree_oracle(const BaseComplex& c, const std::vector<Point>& image) {
  double total = 0.0;
  for (const auto& t : c.triangles()) total += solid_angle(image[t[0]], image[t[1]], image[t[2]]);
  return std::lround(total / (4.0 * std::numbers::pi));
}

std::vector<Complex> random_gauge(std::size_t n, Rng& rng) {
  std::vector<Complex> g;
  for (std::size_t i = 0; i < n; ++i) g.push_back(random_phase(rng));
  return g;
}

bool same_class(const CohomologyClass& x, const CohomologyClass& y) {
  if (x.free_coords != y.free_coords) return false;
  if (x.torsion_coords.size() != y.torsion_coords.size()) return false;
  for (std::size_t i = 0; i < x.torsion_coords.size(); ++i) {
    const BigInt m = x.group.torsion[i];
    BigInt d = (x.torsion_coords[i] - y.torsion_coords[i]) % m;
    if (d != 0) return false;
  }
  return true;
}

PhaseSection constant_section(const ComplexPtr& base, const CMat& x) {
  return make_section(base, std::vector<CMat>(base->vertex_count(), x));
}

OperatorField constant_pair_field(const ComplexPtr& base, const CMat& a, const CMat& b) {
  return OperatorField::from_pairs(base, std::vector<Pair>(base->vertex_count(), Pair{a, b}));
}

struct Skyrmion {
  Mesh mesh;
  PhaseSection section;
};

Skyrmion torus_skyrmion() {
  Mesh m = torus(10, 10);
  auto s = skyrmion_section(m.complex, grid_uv(10, 10));
  return {std::move(m), std::move(s)};
}

Skyrmion klein_skyrmion() {
  Mesh m = klein(10, 10);
  auto s = skyrmion_section(m.complex, grid_uv(10, 10));
  return {std::move(m), std::move(s)};
}

}  // namespace

TEST(Section, ConstantSectionHasZeroPhasesAndCocycle) {
  Rng rng(61);
  const Mesh m = disc(3);
  const auto s = constant_section(m.complex, random_cmat(2, rng));
  for (double t : s.edge_phases) EXPECT_NEAR(t, 0.0, 1e-14);
  const auto cc = chern_cocycle(s);
  for (auto w : cc.w) EXPECT_EQ(w, 0);
  EXPECT_TRUE(chern_class(cc).is_zero());
  const auto tr = trivialize(s);
  for (auto g : tr.gauge) EXPECT_NEAR(std::abs(g - Complex(1.0)), 0.0, 1e-14);
  for (auto x : tr.twist) EXPECT_EQ(x, 0);
  for (const auto& [e, r] : tr.residuals) EXPECT_NEAR(r, 0.0, 1e-14);
}

TEST(Section, PureGaugeIsInvertedUpToGlobalPhase) {
  Rng rng(62);
  const Mesh m = disc(4);
  const auto base = constant_section(m.complex, random_cmat(3, rng));
  const auto lambda = random_gauge(base.size(), rng);
  const auto s = gauge(base, lambda);
  const auto cc = chern_cocycle(s);
  EXPECT_TRUE(chern_class(cc).is_zero());
  const auto tr = trivialize(s);
  const Complex global = lambda[0] * tr.gauge[0];
  for (std::size_t v = 0; v < s.size(); ++v) EXPECT_NEAR(std::abs(lambda[v] * tr.gauge[v] - global), 0.0, 1e-10);
  for (double a : tr.adjusted) EXPECT_NEAR(a, 0.0, 1e-10);
  // the twisted cochain really bounds the cocycle
  const auto d1 = coboundary_matrix(*s.base, 1);
  const auto dm = d1.apply<std::int64_t>(tr.twist);
  EXPECT_EQ(dm, cc.w);
}

TEST(Section, GaugeChangesCocycleByACoboundary) {
  Rng rng(63);
  const Mesh sphere = icosphere(1);
  const auto s = monopole_section(sphere);
  const auto c0 = chern_cocycle(s);
  const CochainComplex cx(sphere.complex);
  for (int k = 0; k < 5; ++k) {
    const auto c1 = chern_cocycle(gauge(s, random_gauge(s.size(), rng)));
    std::vector<std::int64_t> diff(c0.w.size());
    for (std::size_t t = 0; t < diff.size(); ++t) diff[t] = c1.w[t] - c0.w[t];
    EXPECT_TRUE(cx.is_coboundary(diff).is_coboundary);
    EXPECT_TRUE(same_class(chern_class(c0), chern_class(c1)));
  }
}

TEST(Section, GaugeInvarianceOnTorsionAndFreeBases) {
  Rng rng(64);
  for (const auto& sk : {torus_skyrmion(), klein_skyrmion()}) {
    const auto k0 = chern_class(chern_cocycle(sk.section));
    for (int k = 0; k < 3; ++k) {
      const auto k1 = chern_class(chern_cocycle(gauge(sk.section, random_gauge(sk.section.size(), rng))));
      EXPECT_TRUE(same_class(k0, k1));
    }
  }
}

TEST(Section, OverlapAndMarginFloors) {
  const Mesh p = path(2);
  CMat e0 = CMat::Zero(2, 1), e1 = CMat::Zero(2, 1);
  e0(0, 0) = 1.0;
  e1(1, 0) = 1.0;
  EXPECT_EQ(kind_of([&] { make_section(p.complex, {e0, e1}); }), ErrorKind::OverlapTooSmall);
  // equatorial triangle bounds a hemisphere: Berry phase exactly pi
  const auto tri = share(BaseComplex::from_triangles(3, {{0, 1, 2}}));
  std::vector<CMat> vals;
  for (int i = 0; i < 3; ++i) vals.push_back(bloch_spinor(std::numbers::pi / 2, 2.0 * std::numbers::pi * i / 3));
  const auto s = make_section(tri, vals);
  EXPECT_NEAR(s.min_overlap(), 0.5, 1e-12);
  EXPECT_EQ(kind_of([&] { chern_cocycle(s); }), ErrorKind::MarginTooSmall);
}

TEST(Monopole, TotalChernNumberMatchesDegree) {
  for (int level : {0, 1, 2}) {
    const Mesh sphere = icosphere(level);
    const auto s = monopole_section(sphere);
    const auto cc = chern_cocycle(s);
    const long deg = degree_oracle(*sphere.complex, sphere.coords);
    ASSERT_EQ(std::abs(deg), 1);
    EXPECT_EQ(cc.total(), deg) << "level " << level;
    const auto k = chern_class(cc);
    EXPECT_EQ(k.group.describe(), "Z");
    ASSERT_EQ(k.free_coords.size(), 1u);
    EXPECT_EQ(abs(k.free_coords[0]), 1);
    EXPECT_EQ(kind_of([&] { trivialize(s); }), ErrorKind::NontrivialClass);
  }
}

TEST(Monopole, SynthesisRoundTripAndObstruction) {
  const Mesh sphere = icosphere(0);
  const auto l = embed_line_in_matrices(monopole_section(sphere), 2);
  const auto k_line = chern_class(chern_cocycle(l));
  const auto f = synthesize_operator(l, Cover::vertex_stars(*sphere.complex));
  const auto rep = validate(f);
  EXPECT_TRUE(rep.ib1_nv());
  const auto back = extract_bundle(f);
  EXPECT_TRUE(same_class(chern_class(chern_cocycle(back)), k_line));
  const auto fr = factor_field(f);
  EXPECT_FALSE(fr.factored);
  EXPECT_FALSE(fr.klass.is_zero());
  EXPECT_TRUE(same_class(fr.klass, k_line));
}

TEST(Monopole, PuncturedSphereFactors) {
  const Mesh sphere = icosphere(1);
  const auto f = synthesize_operator(embed_line_in_matrices(monopole_section(sphere), 3), Cover::whole(*sphere.complex));
  std::size_t south = 0;
  for (std::size_t v = 0; v < sphere.coords.size(); ++v)
    if (sphere.coords[v][2] < sphere.coords[south][2]) south = v;
  const auto disc_part = restrict(f, subcomplex(*f.base, [&](std::size_t v) { return v != south; }));
  EXPECT_TRUE(cohomology(disc_part.base, 2).is_zero());
  const auto fr = factor_field(disc_part);
  ASSERT_TRUE(fr.factored);
  EXPECT_LT(fr.max_residual, 1e-8);
  // the gauged left factors are nearly parallel along tree edges
  const auto s = make_section(disc_part.base, [&] {
    std::vector<CMat> a;
    for (const auto& p : fr.pairs) a.push_back(p.a);
    return a;
  }());
  for (std::size_t e : fr.trivialization.tree_edges) EXPECT_NEAR(s.edge_phases[e], 0.0, 1e-9);
}

TEST(Skyrmion, TorusAndKleinClasses) {
  const auto t = torus_skyrmion();
  const auto kt = chern_class(chern_cocycle(t.section));
  EXPECT_EQ(kt.group.describe(), "Z");
  ASSERT_EQ(kt.free_coords.size(), 1u);
  EXPECT_EQ(abs(kt.free_coords[0]), 1);
  std::vector<Point> image;
  for (const auto& v : t.section.values) {
    // image point of the spinor on the Bloch sphere
    const Complex a = v(0, 0), b = v(1, 0);
    const Complex ab = std::conj(a) * b;
    image.push_back({2.0 * ab.real(), 2.0 * ab.imag(), std::norm(a) - std::norm(b)});
  }
  EXPECT_EQ(chern_cocycle(t.section).total(), degree_oracle(*t.mesh.complex, image));

  const auto k = klein_skyrmion();
  const auto kk = chern_class(chern_cocycle(k.section));
  EXPECT_EQ(kk.group.describe(), "Z/2");
  EXPECT_TRUE(kk.free_coords.empty());
  ASSERT_EQ(kk.torsion_coords.size(), 1u);
  EXPECT_NE(kk.torsion_coords[0] % 2, 0);
  EXPECT_EQ(kind_of([&] { trivialize(k.section); }), ErrorKind::NontrivialClass);
}

TEST(Synthesis, RoundTripPreservesClassOnStandardBases) {
  Rng rng(65);
  const Mesh d = disc(4);
  std::vector<CMat> dv;
  for (const auto& p : d.coords) {
    CMat x = identity(2);
    x(0, 1) = Complex(p[0], 0.5 * p[1]);
    dv.push_back(std::polar(1.0, 3.0 * p[0] * p[1]) * x);
  }
  const auto disc_line = make_section(d.complex, dv);
  const Mesh sphere = icosphere(0);
  const auto sphere_line = embed_line_in_matrices(monopole_section(sphere), 2);
  const auto torus_line = embed_line_in_matrices(torus_skyrmion().section, 2);
  for (const auto* l : {&disc_line, &sphere_line, &torus_line}) {
    Cover cv = Cover::vertex_stars(*l->base);
    cv.uniform_weights = l->size() > 40;
    const auto f = synthesize_operator(*l, cv);
    EXPECT_TRUE(validate(f).ib1_nv());
    EXPECT_TRUE(same_class(chern_class(chern_cocycle(extract_bundle(f))), chern_class(chern_cocycle(*l))));
    // extraction gives the same line at every vertex
    const auto back = extract_bundle(f);
    for (std::size_t v = 0; v < l->size(); ++v) EXPECT_NEAR(std::abs(hs_inner(back.values[v], l->values[v])), 1.0, 1e-9);
  }
}

TEST(Synthesis, ConstantLineAndPositivity) {
  const Mesh d = disc(3);
  const CMat e11 = matrix_unit(2, 0, 0);
  const auto f = synthesize_operator(constant_section(d.complex, e11), Cover::vertex_stars(*d.complex));
  const auto m11 = to_fibre_matrix(ElementaryRep::single(e11, e11));
  Rng rng(66);
  for (std::size_t v = 0; v < f.size(); ++v) {
    // c(t) M_{e11,e11} with c(t) > 0
    const Complex c = f.fibres[v].matrix(0, 0);
    EXPECT_GT(c.real(), 0.0);
    EXPECT_LT((f.fibres[v].matrix - c * m11.matrix).norm(), 1e-15);
    EXPECT_TRUE(is_completely_positive(f.fibres[v]));
    const CMat g = random_cmat(2, rng);
    const CMat y = f.fibres[v](g * g.adjoint());
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<CMat>(y).eigenvalues().minCoeff(), -1e-12);
  }
  Cover partial;
  partial.patches = {{0, 1}};
  EXPECT_EQ(kind_of([&] { synthesize_operator(constant_section(d.complex, e11), partial); }),
            ErrorKind::CoverDoesNotSpan);
}

TEST(Synthesis, MonopoleFibresAreCompletelyPositive) {
  const Mesh sphere = icosphere(1);
  const auto f = synthesize_operator(embed_line_in_matrices(monopole_section(sphere), 3), Cover::whole(*sphere.complex));
  for (const auto& fib : f.fibres) EXPECT_TRUE(is_completely_positive(fib));
}

TEST(Embed, MatrixUnitsAndErrors) {
  const Mesh p = path(2);
  CMat e0 = CMat::Zero(2, 1), e1 = CMat::Zero(2, 1);
  e0(0, 0) = 1.0;
  e1(1, 0) = 1.0;
  const auto s0 = embed_line_in_matrices(make_section(p.complex, {e0, e0}), 3);
  EXPECT_EQ(s0.values[0], matrix_unit(3, 0, 0));
  const auto s1 = embed_line_in_matrices(make_section(p.complex, {e1, e1}), 2);
  EXPECT_EQ(s1.values[1], matrix_unit(2, 0, 1));
  EXPECT_EQ(kind_of([&] { embed_line_in_matrices(make_section(p.complex, {e0, e0}), 1); }), ErrorKind::InvalidInput);
  const Mesh sphere = icosphere(1);
  const auto l = monopole_section(sphere);
  const auto cl = chern_cocycle(l), ce = chern_cocycle(embed_line_in_matrices(l, 4));
  EXPECT_EQ(cl.w, ce.w);
}

TEST(TwoSections, CollapseAndMonopoleObstruction) {
  Rng rng(67);
  const Mesh p = path(3);
  const CMat a = random_unit_cmat(2, rng);
  const std::vector<CMat> zero(3, CMat::Zero(2, 2));
  const auto f0 = phi_from_two_sections(p.complex, std::vector<CMat>(3, a), zero);
  EXPECT_LT((f0.fibres[0].matrix - to_fibre_matrix(ElementaryRep::single(a, a.adjoint())).matrix).norm(), 1e-14);
  const CMat s = random_unit_cmat(2, rng);
  const auto f1 = phi_from_two_sections(p.complex, {2.0 * s, s, 0.5 * s}, {s, -3.0 * s, s});
  const auto mss = to_fibre_matrix(ElementaryRep::single(s, s.adjoint())).matrix;
  EXPECT_LT((f1.fibres[0].matrix - 5.0 * mss).norm(), 1e-12);
  EXPECT_LT((f1.fibres[1].matrix - 10.0 * mss).norm(), 1e-12);
  EXPECT_LT((f1.fibres[2].matrix - 1.25 * mss).norm(), 1e-12);
  EXPECT_EQ(kind_of([&] { phi_from_two_sections(p.complex, {a, a, a}, {a, random_unit_cmat(2, rng), a}); }),
            ErrorKind::SpanNotLine);
  EXPECT_EQ(kind_of([&] { phi_from_two_sections(p.complex, {a, zero[0], a}, zero); }), ErrorKind::SpanNotLine);

  const Mesh sphere = icosphere(1);
  const auto [na, sb] = monopole_hemisphere_sections(sphere, 2);
  const auto f = phi_from_two_sections(sphere.complex, na, sb);
  const auto r = validate(f);
  EXPECT_TRUE(r.ib1_nv());
  for (const auto& fib : f.fibres) EXPECT_TRUE(is_completely_positive(fib));
  const auto fr = factor_field(f);
  EXPECT_FALSE(fr.factored);
  EXPECT_TRUE(same_class(fr.klass, chern_class(chern_cocycle(monopole_section(sphere)))));
}

TEST(Factor, ConstantMultiplicationRecoversFactors) {
  Rng rng(68);
  const Mesh t = torus(4, 5);
  const CMat a = random_cmat(2, rng), b = random_cmat(2, rng);
  const auto fr = factor_field(constant_pair_field(t.complex, a, b));
  ASSERT_TRUE(fr.factored);
  EXPECT_LT(fr.max_residual, 1e-10);
  for (const auto& p : fr.pairs) {
    // (a, b) up to conjugate scalars
    const Complex z = hs_inner(p.a, a) / hs_inner(a, a);
    EXPECT_LT((p.a - z * a).norm(), 1e-9 * a.norm());
    EXPECT_LT((p.b - b / z).norm(), 1e-9 * b.norm());
    EXPECT_NEAR(op_norm(p.a), op_norm(p.b), 1e-10);
  }
}

TEST(Factor, SucceedsExactlyWhenClassVanishes) {
  Rng rng(69);
  std::vector<std::pair<OperatorField, bool>> battery;
  const Mesh t = torus(6, 6);
  // winding phase around the torus: trivial class, nonzero holonomy
  const CMat a = random_unit_cmat(2, rng), b = random_unit_cmat(2, rng);
  std::vector<Pair> wind;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      const Complex z = std::polar(1.0 + 0.1 * j, 2.0 * std::numbers::pi * i / 6.0);
      wind.push_back({z * a, b});
    }
  battery.emplace_back(OperatorField::from_pairs(t.complex, wind), true);
  battery.emplace_back(constant_pair_field(t.complex, a, b), true);
  const auto sk = torus_skyrmion();
  battery.emplace_back(synthesize_operator(embed_line_in_matrices(sk.section, 2), Cover::whole(*sk.mesh.complex)), false);
  const auto kl = klein_skyrmion();
  battery.emplace_back(synthesize_operator(embed_line_in_matrices(kl.section, 2), Cover::whole(*kl.mesh.complex)), false);
  const Mesh sphere = icosphere(1);
  battery.emplace_back(
      synthesize_operator(embed_line_in_matrices(monopole_section(sphere), 2), Cover::whole(*sphere.complex)), false);
  const Mesh d = disc(4);
  std::vector<Pair> dp;
  for (const auto& p : d.coords) dp.push_back({std::polar(1.0, 1.5 * p[0]) * a + p[1] * b, b});
  battery.emplace_back(OperatorField::from_pairs(d.complex, dp), true);

  for (std::size_t i = 0; i < battery.size(); ++i) {
    const auto& [f, trivial] = battery[i];
    const auto fr = factor_field(f);
    const bool zero = chern_class(chern_cocycle(extract_bundle(f))).is_zero();
    EXPECT_EQ(fr.factored, zero) << i;
    EXPECT_EQ(fr.factored, trivial) << i;
    if (fr.factored) {
      EXPECT_LT(fr.max_residual, 1e-8) << i;
    }
  }
  // the winding instance: holonomy is a multiple of 2 pi, split between twist and residuals
  const auto fr = factor_field(battery[0].first);
  for (const auto& [e, r] : fr.trivialization.residuals) {
    const double turns = r / (2.0 * std::numbers::pi);
    EXPECT_NEAR(turns, std::round(turns), 1e-9);
  }
}

TEST(Factor, ErrorsPropagate) {
  const Mesh p = path(2);
  std::vector<Pair> ps = {{identity(2), identity(2)}, {CMat::Zero(2, 2), identity(2)}};
  EXPECT_EQ(kind_of([&] { factor_field(OperatorField::from_pairs(p.complex, ps)); }), ErrorKind::VanishingFibre);
  std::vector<ElementaryRep> reps(2, ElementaryRep::single(identity(2), identity(2)));
  reps[1] = ElementaryRep(2, {Pair{matrix_unit(2, 0, 0), matrix_unit(2, 0, 0)}, Pair{matrix_unit(2, 1, 1), matrix_unit(2, 1, 1)}});
  try {
    extract_bundle(OperatorField::from_reps(p.complex, 2, reps));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotRankOne);
    EXPECT_EQ(e.where(), std::vector<std::size_t>{1});
  }
}

TEST(Subdivision, AdmissibilityAndClassSurviveRefinement) {
  std::vector<PhaseSection> battery;
  const Mesh sphere = icosphere(0);
  battery.push_back(monopole_section(sphere));
  battery.push_back(torus_skyrmion().section);
  battery.push_back(klein_skyrmion().section);
  Rng rng(70);
  const Mesh d = disc(3);
  battery.push_back(gauge(constant_section(d.complex, random_cmat(2, rng)), random_gauge(16, rng)));
  for (const auto& s : battery) {
    const auto cc = chern_cocycle(s);
    const auto sd = barycentric_subdivision(*s.base);
    const auto fine = subdivide_section(s, sd);
    EXPECT_GE(fine.min_overlap(), s.rho);
    const auto fc = chern_cocycle(fine);
    EXPECT_GE(fc.margin, cc.margin * 0.5);
    const auto k0 = chern_class(cc), k1 = chern_class(fc);
    EXPECT_EQ(k0.group.describe(), k1.group.describe());
    EXPECT_EQ(k0.is_zero(), k1.is_zero());
    if (!k0.free_coords.empty()) EXPECT_EQ(abs(k0.free_coords[0]), abs(k1.free_coords[0]));
    for (std::size_t i = 0; i < k0.torsion_coords.size(); ++i)
      EXPECT_EQ(k0.torsion_coords[i] % 2 == 0, k1.torsion_coords[i] % 2 == 0);
  }
}

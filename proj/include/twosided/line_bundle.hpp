// SPDX-License-Identifier: Apache-2.0
//
// Line subbundles spanned by the left factors of a fibrewise rank-one field:
// extraction, discrete first Chern cocycle, triviality, global factorization
// and synthesis of operator fields from line data.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "twosided/cohomology.hpp"
#include "twosided/complex.hpp"
#include "twosided/fibre.hpp"
#include "twosided/field.hpp"

namespace twosided {

inline constexpr double kDefaultOverlapFloor = 0.1;
inline constexpr double kDefaultMarginFloor = std::numbers::pi / 6.0;

struct BundleOptions {
  double rho = kDefaultOverlapFloor;
  double margin_floor = kDefaultMarginFloor;
  FieldOptions field{};
};

/// Unit section of a line bundle, each value defined up to a unit scalar.
/// Values are n x n matrices, or m x 1 columns for C^m-valued sections.
struct PhaseSection {
  ComplexPtr base;
  std::vector<CMat> values;
  std::vector<double> edge_phases;  // arg <s_lo, s_hi> per edge, lo < hi
  std::vector<double> overlaps;     // |<s_lo, s_hi>|
  double rho = kDefaultOverlapFloor;

  std::size_t rows() const { return values.empty() ? 0 : static_cast<std::size_t>(values.front().rows()); }
  bool matrix_valued() const { return !values.empty() && values.front().rows() == values.front().cols(); }
  std::size_t size() const { return values.size(); }
  double min_overlap() const {
    return overlaps.empty() ? 1.0 : *std::min_element(overlaps.begin(), overlaps.end());
  }
};

namespace detail {

inline double wrap_phase(double t) {
  const double two_pi = 2.0 * std::numbers::pi;
  t = std::remainder(t, two_pi);
  return t <= -std::numbers::pi ? t + two_pi : t;
}

}  // namespace detail

/// Normalizes the values and measures edge phases and overlaps.
inline PhaseSection make_section(ComplexPtr base, std::vector<CMat> values, double rho = kDefaultOverlapFloor) {
  if (!base) fail(ErrorKind::InvalidInput, "section has no base complex");
  if (values.size() != base->vertex_count()) fail(ErrorKind::DimensionMismatch, "one value per vertex required");
  if (!(rho > 0.0) || rho > 1.0) fail(ErrorKind::InvalidInput, "overlap floor must lie in (0, 1]");
  PhaseSection s;
  s.base = std::move(base);
  s.rho = rho;
  for (std::size_t v = 0; v < values.size(); ++v) {
    CMat& x = values[v];
    if (x.rows() != values.front().rows() || x.cols() != values.front().cols())
      fail(ErrorKind::DimensionMismatch, "section values differ in shape", {v});
    if (!all_finite(x)) fail(ErrorKind::InvalidInput, "non-finite section value", {v});
    const double nrm = hs_norm(x);
    if (!(nrm > 0.0)) fail(ErrorKind::VanishingFibre, "section vanishes", {v});
    x /= nrm;
  }
  s.values = std::move(values);
  const auto& edges = s.base->edges();
  s.edge_phases.resize(edges.size());
  s.overlaps.resize(edges.size());
  std::vector<std::size_t> thin;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::size_t lo = std::min(edges[e][0], edges[e][1]), hi = std::max(edges[e][0], edges[e][1]);
    const Complex ip = hs_inner(s.values[lo], s.values[hi]);
    s.overlaps[e] = std::abs(ip);
    s.edge_phases[e] = std::arg(ip);
    if (s.overlaps[e] < rho) thin.push_back(e);
  }
  if (!thin.empty())
    fail(ErrorKind::OverlapTooSmall, std::to_string(thin.size()) + " edge(s) below the overlap floor", thin);
  return s;
}

/// s(v) -> lambda(v) s(v).
inline PhaseSection gauge(const PhaseSection& s, const std::vector<Complex>& lambda) {
  if (lambda.size() != s.size()) fail(ErrorKind::DimensionMismatch, "one gauge scalar per vertex required");
  std::vector<CMat> vals;
  for (std::size_t v = 0; v < s.size(); ++v) {
    if (std::abs(std::abs(lambda[v]) - 1.0) > 1e-12) fail(ErrorKind::InvalidInput, "gauge scalars must be unimodular", {v});
    vals.push_back(lambda[v] * s.values[v]);
  }
  return make_section(s.base, std::move(vals), s.rho);
}

/// Left factors of a fibrewise rank-one, nowhere-vanishing field.
inline PhaseSection extract_bundle(const OperatorField& f, const BundleOptions& opt = {}) {
  const FieldReport r = validate(f, opt.field);
  for (std::size_t v = 0; v < f.size(); ++v)
    if (r.lengths[v] > 1) fail(ErrorKind::NotRankOne, "fibre has length > 1", {v});
  for (std::size_t v = 0; v < f.size(); ++v)
    if (!(r.norms[v] > r.zero_tol) || r.norms[v] == 0.0) fail(ErrorKind::VanishingFibre, "fibre vanishes", {v});
  std::vector<CMat> vals(f.size());
  parallel_for(f.size(), opt.field.threads, [&](std::size_t v) {
    vals[v] = rank_one_factor(f.fibres[v], std::max(opt.field.rank_tol, 1e-7)).a;
  });
  return make_section(f.base, std::move(vals), opt.rho);
}

struct ChernCocycle {
  ComplexPtr base;
  std::vector<std::int64_t> w;      // per triangle
  std::vector<double> phase_sums;   // theta_uv + theta_vw + theta_wu
  double margin = std::numbers::pi; // min distance of a phase sum to an odd multiple of pi

  std::int64_t total() const {
    std::int64_t t = 0;
    for (auto x : w) t += x;
    return t;
  }
};

/// Signed phase of the traversal u -> v.
inline double oriented_phase(const PhaseSection& s, std::size_t u, std::size_t v) {
  const auto [e, sign] = s.base->oriented_edge(u, v);
  return sign * s.edge_phases[e];
}

inline ChernCocycle chern_cocycle(const PhaseSection& s, double margin_floor = kDefaultMarginFloor) {
  ChernCocycle cc;
  cc.base = s.base;
  const auto& tris = s.base->triangles();
  cc.w.resize(tris.size());
  cc.phase_sums.resize(tris.size());
  std::vector<std::size_t> thin;
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& [a, b, c] = tris[t];
    const double sum = oriented_phase(s, a, b) + oriented_phase(s, b, c) + oriented_phase(s, c, a);
    const double k = std::round(sum / two_pi);
    const double m = std::numbers::pi - std::abs(sum - two_pi * k);
    cc.phase_sums[t] = sum;
    cc.w[t] = static_cast<std::int64_t>(k);
    cc.margin = std::min(cc.margin, m);
    if (!(m > margin_floor)) thin.push_back(t);
  }
  if (!thin.empty())
    fail(ErrorKind::MarginTooSmall, std::to_string(thin.size()) + " triangle phase sum(s) too close to an odd multiple of pi",
         thin);
  return cc;
}

inline CohomologyClass chern_class(const ChernCocycle& cc) { return CochainComplex(cc.base).class_of(cc.w); }

struct Trivialization {
  std::vector<Complex> gauge;          // per vertex
  std::vector<std::int64_t> twist;     // integer 1-cochain m with delta m = w
  std::vector<double> adjusted;        // theta_e - 2 pi m_e + gauge difference, per edge
  std::vector<std::size_t> tree_edges;
  std::vector<std::pair<std::size_t, double>> residuals;  // non-tree edges
  double max_residual = 0.0;
};

/// Spanning-tree gauge after removing the integer twist; fails when the
/// Chern class is nonzero.
inline Trivialization trivialize(const PhaseSection& s, double margin_floor = kDefaultMarginFloor) {
  const ChernCocycle cc = chern_cocycle(s, margin_floor);
  const CochainComplex cx(s.base);
  const CoboundaryResult cb = cx.is_coboundary(cc.w);
  if (!cb.is_coboundary) fail(ErrorKind::NontrivialClass, "Chern class is nonzero");
  const BaseComplex& c = *s.base;
  Trivialization out;
  out.twist = *cb.witness;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> phi(c.edge_count());
  for (std::size_t e = 0; e < phi.size(); ++e) phi[e] = s.edge_phases[e] - two_pi * static_cast<double>(out.twist[e]);

  std::vector<double> gamma(c.vertex_count(), 0.0);
  std::vector<bool> seen(c.vertex_count(), false), in_tree(c.edge_count(), false);
  const auto adj = c.adjacency();
  for (std::size_t root = 0; root < c.vertex_count(); ++root) {
    if (seen[root]) continue;
    seen[root] = true;
    std::queue<std::size_t> q;
    q.push(root);
    while (!q.empty()) {
      const std::size_t x = q.front();
      q.pop();
      for (std::size_t y : adj[x]) {
        if (seen[y]) continue;
        seen[y] = true;
        const auto [e, sign] = c.oriented_edge(x, y);
        gamma[y] = gamma[x] + sign * phi[e];
        in_tree[e] = true;
        out.tree_edges.push_back(e);
        q.push(y);
      }
    }
  }
  for (double g : gamma) out.gauge.push_back(std::polar(1.0, g));
  out.adjusted.resize(c.edge_count());
  for (std::size_t e = 0; e < c.edge_count(); ++e) {
    const std::size_t lo = std::min(c.edges()[e][0], c.edges()[e][1]), hi = std::max(c.edges()[e][0], c.edges()[e][1]);
    out.adjusted[e] = phi[e] + gamma[lo] - gamma[hi];
    if (!in_tree[e]) {
      out.residuals.emplace_back(e, out.adjusted[e]);
      out.max_residual = std::max(out.max_residual, std::abs(out.adjusted[e]));
    }
  }
  return out;
}

struct FactorResult {
  bool factored = false;
  ChernCocycle cocycle;
  CohomologyClass klass;
  std::vector<Pair> pairs;     // per vertex, when factored
  Trivialization trivialization;
  double max_residual = 0.0;   // sup_t of an upper bound on ||phi_t - M_{a,b}||, relative to sup ||phi||
};

/// Global factorization phi_t = M_{a(t), b(t)} when the line bundle is
/// trivial; otherwise the nonzero class is returned as the obstruction.
inline FactorResult factor_field(const OperatorField& f, const BundleOptions& opt = {}) {
  const PhaseSection s = extract_bundle(f, opt);
  FactorResult out;
  out.cocycle = chern_cocycle(s, opt.margin_floor);
  out.klass = chern_class(out.cocycle);
  if (!out.klass.is_zero()) return out;
  out.trivialization = trivialize(s, opt.margin_floor);
  out.factored = true;
  out.pairs.resize(f.size());
  std::vector<double> res(f.size(), 0.0), norms(f.size(), 0.0);
  parallel_for(f.size(), opt.field.threads, [&](std::size_t v) {
    auto r = rank_one_factor(f.fibres[v], std::max(opt.field.rank_tol, 1e-7));
    // align with the extracted section, then apply the gauge
    const Complex ph = hs_inner(s.values[v], r.a);
    const Complex to_section = std::abs(ph) > 0.0 ? std::conj(ph) / std::abs(ph) : Complex(1.0);
    const Complex lambda = out.trivialization.gauge[v] * to_section;
    const CMat a = lambda * r.a;
    const CMat b = std::conj(lambda) * r.b;
    const auto g = to_fibre_matrix(ElementaryRep(f.n, {Pair{a, b}}));
    // ||phi||_{op->op} <= sqrt(n) ||F||_HS
    res[v] = std::sqrt(static_cast<double>(f.n)) * (g.matrix - f.fibres[v].matrix).norm();
    norms[v] = op_norm(a) * op_norm(b);
    out.pairs[v] = Pair{a, b};
  });
  const double sup = *std::max_element(norms.begin(), norms.end());
  for (double r : res) out.max_residual = std::max(out.max_residual, sup > 0.0 ? r / sup : r);
  return out;
}

/// Cover of the base by vertex sets. Patch i carries weight 2^{-(i+1)} by
/// default.
struct Cover {
  std::vector<std::vector<std::size_t>> patches;
  bool uniform_weights = false;

  double weight(std::size_t i) const {
    return uniform_weights ? 1.0 / static_cast<double>(patches.size()) : std::ldexp(1.0, -static_cast<int>(i + 1));
  }

  static Cover vertex_stars(const BaseComplex& c) {
    Cover cv;
    const auto adj = c.adjacency();
    for (std::size_t v = 0; v < c.vertex_count(); ++v) {
      std::vector<std::size_t> star{v};
      star.insert(star.end(), adj[v].begin(), adj[v].end());
      std::sort(star.begin(), star.end());
      cv.patches.push_back(std::move(star));
    }
    return cv;
  }

  static Cover whole(const BaseComplex& c) {
    Cover cv;
    cv.patches.emplace_back(c.vertex_count());
    std::iota(cv.patches.back().begin(), cv.patches.back().end(), 0);
    return cv;
  }
};

/// phi_t = sum_i w_i sum_j M_{f_j^i(t), f_j^i(t)*}, with f_j^i the projection
/// of the j-th matrix unit onto the line at t for every patch i containing t.
inline OperatorField synthesize_operator(const PhaseSection& s, const Cover& cover) {
  if (!s.matrix_valued()) fail(ErrorKind::DimensionMismatch, "section must be matrix valued; embed it first");
  const std::size_t n = s.rows();
  const std::size_t nv = s.size();
  std::vector<double> scale(nv, 0.0);
  for (std::size_t i = 0; i < cover.patches.size(); ++i)
    for (std::size_t t : cover.patches[i]) {
      if (t >= nv) fail(ErrorKind::InvalidInput, "cover names a vertex out of range", {t});
      double frame = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) frame += std::norm(s.values[t](k, l));  // |<e_kl, s_t>|^2
      scale[t] += cover.weight(i) * frame;
    }
  std::vector<FibreOperator> fs;
  for (std::size_t t = 0; t < nv; ++t) {
    if (!(scale[t] > 0.0)) fail(ErrorKind::CoverDoesNotSpan, "no patch frame reaches this fibre", {t});
    const CMat& x = s.values[t];
    fs.push_back(to_fibre_matrix(ElementaryRep(n, {Pair{x, x.adjoint()}})) * scale[t]);
  }
  return OperatorField(s.base, n, std::move(fs));
}

/// C^m -> M_n, z -> sum_k z_k e_{1,k}.
inline PhaseSection embed_line_in_matrices(const PhaseSection& s, std::size_t n) {
  if (n < 2) fail(ErrorKind::InvalidInput, "embedding needs n >= 2");
  if (s.values.empty()) return make_section(s.base, {}, s.rho);
  if (s.values.front().cols() != 1) fail(ErrorKind::DimensionMismatch, "section values must be column vectors");
  if (s.rows() > n) fail(ErrorKind::DimensionMismatch, "vector dimension exceeds n");
  std::vector<CMat> vals;
  for (const auto& z : s.values) {
    CMat x = CMat::Zero(n, n);
    x.row(0).head(z.rows()) = z.col(0).transpose();
    vals.push_back(std::move(x));
  }
  return make_section(s.base, std::move(vals), s.rho);
}

/// phi_t = M_{a,a*} + M_{b,b*} for a(t), b(t) in a common line.
inline OperatorField phi_from_two_sections(ComplexPtr base, const std::vector<CMat>& a, const std::vector<CMat>& b,
                                           double tol = 1e-9) {
  if (!base || a.size() != base->vertex_count() || b.size() != a.size())
    fail(ErrorKind::DimensionMismatch, "one pair of values per vertex required");
  if (a.empty()) fail(ErrorKind::InvalidInput, "empty base");
  const auto n = static_cast<std::size_t>(a.front().rows());
  std::vector<FibreOperator> fs;
  for (std::size_t t = 0; t < a.size(); ++t) {
    require_square(a[t], "a");
    require_same_dim(a[t], a.front());
    require_same_dim(a[t], b[t]);
    const double na = hs_norm(a[t]), nb = hs_norm(b[t]);
    if (!(na > 0.0) && !(nb > 0.0)) fail(ErrorKind::SpanNotLine, "both sections vanish", {t});
    if (na > 0.0 && nb > 0.0 && std::abs(hs_inner(a[t], b[t])) < (1.0 - tol) * na * nb)
      fail(ErrorKind::SpanNotLine, "sections span more than a line", {t});
    const FibreOperator g = to_fibre_matrix(ElementaryRep(n, {Pair{a[t], a[t].adjoint()}, Pair{b[t], b[t].adjoint()}}));
    if (length(g) != 1) fail(ErrorKind::SpanNotLine, "fibre is not a single multiplication", {t});
    fs.push_back(g);
  }
  return OperatorField(std::move(base), n, std::move(fs));
}

/// Section on a barycentric subdivision: each new vertex gets the normalized
/// sum of its carrier values, phase-aligned to the first carrier vertex.
inline PhaseSection subdivide_section(const PhaseSection& s, const Subdivision& sd) {
  std::vector<CMat> vals;
  for (const auto& car : sd.carrier) {
    const CMat& r = s.values[car.front()];
    CMat acc = r;
    for (std::size_t i = 1; i < car.size(); ++i) {
      const CMat& x = s.values[car[i]];
      const Complex ip = hs_inner(r, x);
      acc += (std::abs(ip) > 0.0 ? ip / std::abs(ip) : Complex(1.0)) * x;
    }
    vals.push_back(std::move(acc));
  }
  return make_section(sd.complex, std::move(vals), s.rho);
}

}  // namespace twosided

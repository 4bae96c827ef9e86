// SPDX-License-Identifier: Apache-2.0
//
// Operator fields t -> phi_t over the vertices of a base complex, in a single
// trivializing chart: every fibre is literally a linear map on M_n.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "twosided/complex.hpp"
#include "twosided/fibre.hpp"
#include "twosided/norms.hpp"
#include "twosided/parallel.hpp"

namespace twosided {

struct OperatorField {
  ComplexPtr base;
  std::size_t n = 1;
  std::vector<FibreOperator> fibres;
  double modulus = std::numeric_limits<double>::infinity();  // max edge jump allowed

  OperatorField() = default;
  OperatorField(ComplexPtr b, std::size_t dim, std::vector<FibreOperator> fs,
                double mod = std::numeric_limits<double>::infinity())
      : base(std::move(b)), n(dim), fibres(std::move(fs)), modulus(mod) {
    if (!base) fail(ErrorKind::InvalidInput, "field has no base complex");
    if (fibres.size() != base->vertex_count())
      fail(ErrorKind::DimensionMismatch, "one fibre per vertex required");
    for (std::size_t v = 0; v < fibres.size(); ++v)
      if (fibres[v].n != n) fail(ErrorKind::DimensionMismatch, "fibre dimension differs", {v});
    if (!(modulus >= 0.0)) fail(ErrorKind::InvalidInput, "continuity modulus must be nonnegative");
  }

  static OperatorField from_reps(ComplexPtr b, std::size_t dim, const std::vector<ElementaryRep>& reps,
                                 double mod = std::numeric_limits<double>::infinity()) {
    std::vector<FibreOperator> fs;
    fs.reserve(reps.size());
    for (const auto& r : reps) fs.push_back(to_fibre_matrix(r));
    return OperatorField(std::move(b), dim, std::move(fs), mod);
  }

  static OperatorField from_pairs(ComplexPtr b, const std::vector<Pair>& pairs,
                                  double mod = std::numeric_limits<double>::infinity()) {
    if (pairs.empty()) fail(ErrorKind::InvalidInput, "no pairs");
    const auto dim = static_cast<std::size_t>(pairs.front().a.rows());
    std::vector<FibreOperator> fs;
    for (const auto& p : pairs) fs.push_back(to_fibre_matrix(ElementaryRep(dim, {p})));
    return OperatorField(std::move(b), dim, std::move(fs), mod);
  }

  std::size_t size() const { return fibres.size(); }
};

struct FieldOptions {
  double zero_tol_rel = 1e-12;  // coz threshold relative to the sup norm
  double rank_tol = kDefaultRankTol;
  std::string boundary_label = kBoundaryLabel;
  NormOptions norm{};
  unsigned threads = 1;
};

struct FieldReport {
  double sup_norm = 0.0;
  double min_norm = 0.0;         // over all vertices
  double min_norm_on_coz = 0.0;  // over the cozero set
  std::size_t argmax = 0;
  double zero_tol = 0.0;
  std::vector<std::size_t> coz;
  std::vector<std::size_t> lengths;
  std::vector<double> norms;
  double max_edge_jump = 0.0;  // only measured when the modulus is finite
  bool ib1 = false;            // every fibre has length <= 1
  bool nv = false;             // nowhere vanishing
  bool ib0 = false;            // vanishes on the boundary label (true when absent)

  bool ib1_nv() const { return ib1 && nv; }
  bool ib01() const { return ib1 && ib0; }
  bool ib01_nv() const { return ib1 && ib0 && nv; }
  std::vector<std::string> flags() const {
    std::vector<std::string> f;
    if (ib1) f.emplace_back("IB1");
    if (ib1_nv()) f.emplace_back("IB1_nv");
    if (ib01()) f.emplace_back("IB01");
    if (ib01_nv()) f.emplace_back("IB01_nv");
    return f;
  }
};

inline FieldReport validate(const OperatorField& f, const FieldOptions& opt = {}) {
  FieldReport r;
  const std::size_t nv = f.size();
  r.lengths.assign(nv, 0);
  r.norms.assign(nv, 0.0);
  parallel_for(nv, opt.threads, [&](std::size_t v) {
    r.lengths[v] = length(f.fibres[v], opt.rank_tol);
    r.norms[v] = fibre_norm(f.fibres[v], opt.norm);
  });
  for (std::size_t v = 0; v < nv; ++v)
    if (r.norms[v] > r.sup_norm) {
      r.sup_norm = r.norms[v];
      r.argmax = v;
    }
  r.zero_tol = opt.zero_tol_rel * r.sup_norm;
  r.min_norm = nv ? *std::min_element(r.norms.begin(), r.norms.end()) : 0.0;
  r.min_norm_on_coz = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < nv; ++v)
    if (r.norms[v] > r.zero_tol) {
      r.coz.push_back(v);
      r.min_norm_on_coz = std::min(r.min_norm_on_coz, r.norms[v]);
      // lengths below the coz threshold are noise
    } else {
      r.lengths[v] = 0;
    }
  if (r.coz.empty()) r.min_norm_on_coz = 0.0;
  r.ib1 = std::all_of(r.lengths.begin(), r.lengths.end(), [](std::size_t l) { return l <= 1; });
  r.nv = r.coz.size() == nv;
  r.ib0 = true;
  if (const auto* bd = f.base->label(opt.boundary_label))
    for (std::size_t v : *bd)
      if (r.norms[v] > r.zero_tol) r.ib0 = false;

  if (std::isfinite(f.modulus)) {
    const auto& edges = f.base->edges();
    std::vector<double> jump(edges.size());
    parallel_for(edges.size(), opt.threads, [&](std::size_t e) {
      jump[e] = fibre_norm(f.fibres[edges[e][0]] - f.fibres[edges[e][1]], opt.norm);
    });
    std::vector<std::size_t> bad;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      r.max_edge_jump = std::max(r.max_edge_jump, jump[e]);
      if (jump[e] > f.modulus) bad.push_back(e);
    }
    if (!bad.empty())
      fail(ErrorKind::ValidationError,
           std::to_string(bad.size()) + " edge(s) exceed the continuity modulus", bad);
  }
  return r;
}

/// phi_t / ||phi_t|| at every vertex.
inline OperatorField normalize(const OperatorField& f, const FieldOptions& opt = {}) {
  const FieldReport r = validate(f, opt);
  if (!r.ib1) {
    for (std::size_t v = 0; v < f.size(); ++v)
      if (r.lengths[v] > 1) fail(ErrorKind::NotRankOne, "fibre has length > 1", {v});
  }
  std::vector<FibreOperator> fs;
  for (std::size_t v = 0; v < f.size(); ++v) {
    if (!(r.norms[v] > r.zero_tol) || r.norms[v] == 0.0)
      fail(ErrorKind::VanishingFibre, "fibre vanishes", {v});
    fs.push_back(f.fibres[v] * (1.0 / r.norms[v]));
  }
  return OperatorField(f.base, f.n, std::move(fs), f.modulus);
}

/// Coefficients a_{k,i}(t) with phi_t = sum_{k,i} M_{e_{k,i}, a_{k,i}(t)}.
struct MatrixUnitDecomposition {
  std::size_t n = 1;
  std::vector<std::vector<CMat>> coeff;  // [vertex][k * n + i]
};

inline MatrixUnitDecomposition decompose_matrix_units(const OperatorField& f) {
  MatrixUnitDecomposition d;
  const std::size_t n = f.n;
  d.n = n;
  d.coeff.resize(f.size());
  for (std::size_t v = 0; v < f.size(); ++v) {
    const CMat& m = f.fibres[v].matrix;
    auto& cs = d.coeff[v];
    cs.assign(n * n, CMat::Zero(n, n));
    // phi(e_ij)(k, l) = a_{k,i}(j, l)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t l = 0; l < n; ++l) cs[k * n + i](j, l) = m(k * n + l, i * n + j);
  }
  return d;
}

inline std::vector<FibreOperator> reassemble(const MatrixUnitDecomposition& d) {
  std::vector<FibreOperator> out;
  const std::size_t n = d.n;
  for (const auto& cs : d.coeff) {
    std::vector<Pair> ps;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) ps.push_back({matrix_unit(n, k, i), cs[k * n + i]});
    out.push_back(to_fibre_matrix(ElementaryRep(n, std::move(ps))));
  }
  return out;
}

struct LocalFactorization {
  std::vector<std::size_t> vertices;       // region vertices (parent indices)
  std::size_t anchor = 0;                  // parent index of the anchor vertex
  std::vector<std::size_t> selected;       // matrix-unit slots k * n + i spanning the right factors
  std::vector<std::vector<Pair>> pairs;    // [region vertex][j]
  double max_residual = 0.0;               // relative Frobenius residual
};

/// Length-l factorization phi_t = sum_j M_{a_j(t), b_j(t)} over a connected
/// region: b_j(t) are the matrix-unit coefficients selected at the anchor,
/// a_j(t) solve the coefficient identity at each vertex.
inline LocalFactorization local_length_factorization(const OperatorField& f, const std::vector<std::size_t>& region,
                                                     std::size_t l, const FieldOptions& opt = {}) {
  if (region.empty()) fail(ErrorKind::InvalidInput, "empty region");
  const Subcomplex sub = subcomplex(*f.base, region);
  const auto comp = components(*sub.complex);
  if (std::any_of(comp.begin(), comp.end(), [](std::size_t c) { return c != 0; }))
    fail(ErrorKind::InvalidInput, "region is not connected");
  const std::size_t n = f.n;
  for (std::size_t v : sub.parent_vertex)
    if (length(f.fibres[v], opt.rank_tol) != l)
      fail(ErrorKind::LengthMismatch, "fibre length differs from " + std::to_string(l), {v});

  const auto dec = decompose_matrix_units(f);
  LocalFactorization out;
  out.vertices = sub.parent_vertex;
  out.anchor = sub.parent_vertex.front();

  // greedy independent selection at the anchor
  const auto& c0 = dec.coeff[out.anchor];
  double scale = 0.0;
  for (const auto& c : c0) scale = std::max(scale, c.norm());
  CMat basis(n * n, 0);
  for (std::size_t s = 0; s < n * n && out.selected.size() < l; ++s) {
    CMat trial(n * n, basis.cols() + 1);
    trial << basis, vec(c0[s]);
    const auto sv = singular_values(trial);
    if (sv(sv.size() - 1) > opt.rank_tol * 1e3 * scale) {
      basis = trial;
      out.selected.push_back(s);
    }
  }
  if (out.selected.size() != l) fail(ErrorKind::IndependenceLost, "anchor coefficients do not span", {out.anchor});

  for (std::size_t v : sub.parent_vertex) {
    const auto& cs = dec.coeff[v];
    CMat b(n * n, l);
    for (std::size_t j = 0; j < l; ++j) b.col(j) = vec(cs[out.selected[j]]);
    const auto sv = singular_values(b);
    double local_scale = 0.0;
    for (const auto& c : cs) local_scale = std::max(local_scale, c.norm());
    if (!(sv(l - 1) > 1e-6 * local_scale))
      fail(ErrorKind::IndependenceLost, "selected coefficients degenerate", {v});
    Eigen::ColPivHouseholderQR<CMat> qr(b);
    // alpha(:, s) expresses coefficient s in the selected basis
    std::vector<CMat> a(l, CMat::Zero(n, n));
    for (std::size_t s = 0; s < n * n; ++s) {
      const CVec alpha = qr.solve(vec(cs[s]));
      for (std::size_t j = 0; j < l; ++j) a[j](s / n, s % n) = alpha(j);
    }
    std::vector<Pair> ps;
    for (std::size_t j = 0; j < l; ++j) ps.push_back({a[j], unvec(b.col(j), n)});
    const ElementaryRep rep(n, ps);
    const double denom = std::max(f.fibres[v].matrix.norm(), 1e-300);
    const double res = (to_fibre_matrix(rep).matrix - f.fibres[v].matrix).norm() / denom;
    if (res > 1e-8) fail(ErrorKind::IndependenceLost, "coefficient identity fails to reproduce the fibre", {v});
    out.max_residual = std::max(out.max_residual, res);
    out.pairs.push_back(std::move(ps));
  }
  return out;
}

inline OperatorField restrict(const OperatorField& f, const Subcomplex& sub) {
  check_subcomplex(*f.base, sub);
  std::vector<FibreOperator> fs;
  for (std::size_t p : sub.parent_vertex) fs.push_back(f.fibres[p]);
  return OperatorField(sub.complex, f.n, std::move(fs), f.modulus);
}

/// Restriction to the induced subcomplex on the cozero set.
inline OperatorField restrict_to_coz(const OperatorField& f, const FieldOptions& opt = {}) {
  const FieldReport r = validate(f, opt);
  return restrict(f, subcomplex(*f.base, r.coz));
}

}  // namespace twosided

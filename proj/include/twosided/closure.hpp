// SPDX-License-Identifier: Apache-2.0
//
// Approximation of decaying rank-one fields by global two-sided
// multiplications over a sublevel exhaustion, and reconstruction of a global
// factorization from a nearby multiplication.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "twosided/field.hpp"
#include "twosided/line_bundle.hpp"
#include "twosided/norms.hpp"
#include "twosided/parallel.hpp"

namespace twosided {

/// K_n = {t : ||phi_t|| >= delta_n} for a strictly decreasing delta.
struct Exhaustion {
  std::vector<double> deltas;
  std::vector<Subcomplex> levels;
  std::vector<double> norms;  // fibre norms of the field it was built from
};

inline std::vector<double> default_deltas(double sup_norm, std::size_t count) {
  std::vector<double> d;
  for (std::size_t n = 1; n <= count; ++n) d.push_back(std::ldexp(sup_norm, -static_cast<int>(n)));
  return d;
}

inline Exhaustion sublevel_exhaustion(const OperatorField& f, const std::vector<double>& deltas,
                                      const FieldOptions& opt = {}) {
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0) || !std::isfinite(deltas[i])) fail(ErrorKind::InvalidInput, "thresholds must be positive", {i});
    if (i > 0 && !(deltas[i] < deltas[i - 1])) fail(ErrorKind::InvalidInput, "thresholds must strictly decrease", {i});
  }
  Exhaustion ex;
  ex.deltas = deltas;
  ex.norms = validate(f, opt).norms;
  for (double d : deltas) ex.levels.push_back(subcomplex(*f.base, [&](std::size_t v) { return ex.norms[v] >= d; }));
  for (std::size_t i = 1; i < ex.levels.size(); ++i)
    if (!std::includes(ex.levels[i].parent_vertex.begin(), ex.levels[i].parent_vertex.end(),
                       ex.levels[i - 1].parent_vertex.begin(), ex.levels[i - 1].parent_vertex.end()))
      fail(ErrorKind::InvalidComplex, "sublevel sets are not nested", {i});
  return ex;
}

struct Approximant {
  std::size_t stage = 0;        // n, counted from 1
  double delta = 0.0;
  std::vector<Pair> pairs;      // (c_n(t), d_n(t)) per vertex
  std::vector<double> errors;   // upper bound on ||phi_t - M_{c,d}|| per vertex
  double error = 0.0;           // sup of `errors`
  double bound = 0.0;           // 2 delta_n
  std::size_t compact_size = 0; // |K_n|
  double residual_on_compact = 0.0;
};

struct ApproximationOptions {
  BundleOptions bundle{};
  NormOptions norm{};
};

namespace detail {

/// Multi-source BFS: graph distance to the source set and the source reached.
inline void nearest_sources(const BaseComplex& c, const std::vector<std::size_t>& sources,
                            std::vector<std::size_t>& dist, std::vector<std::size_t>& nearest) {
  constexpr auto kFar = std::numeric_limits<std::size_t>::max();
  dist.assign(c.vertex_count(), kFar);
  nearest.assign(c.vertex_count(), kFar);
  std::queue<std::size_t> q;
  for (std::size_t s : sources) {
    dist[s] = 0;
    nearest[s] = s;
    q.push(s);
  }
  const auto adj = c.adjacency();
  while (!q.empty()) {
    const std::size_t x = q.front();
    q.pop();
    for (std::size_t y : adj[x])
      if (dist[y] == kFar) {
        dist[y] = dist[x] + 1;
        nearest[y] = nearest[x];
        q.push(y);
      }
  }
}

inline void cap_norm(CMat& x, double cap) {
  const double n = op_norm(x);
  if (n > cap && n > 0.0) x *= cap / n;
}

}  // namespace detail

/// One global pair per stage: exact on K_n from the trivialized bundle,
/// scaled toward zero along graph distance outside and capped at sqrt(delta_n).
inline std::vector<Approximant> approximate_by_multiplications(const OperatorField& f, const Exhaustion& ex,
                                                               const ApproximationOptions& opt = {}) {
  const FieldReport rep = validate(f, opt.bundle.field);
  if (!rep.ib1) fail(ErrorKind::PreconditionViolated, "field has a fibre of length > 1");
  if (!rep.ib0) fail(ErrorKind::PreconditionViolated, "field does not vanish on the boundary label");
  const std::size_t nv = f.size();
  std::vector<RankOneFactor> factors(nv);
  parallel_for(nv, opt.bundle.field.threads, [&](std::size_t v) {
    if (rep.norms[v] > rep.zero_tol) factors[v] = rank_one_factor(f.fibres[v], std::max(opt.bundle.field.rank_tol, 1e-7));
    else factors[v] = {CMat::Zero(f.n, f.n), CMat::Zero(f.n, f.n), 0.0};
  });

  std::vector<Approximant> out;
  for (std::size_t i = 0; i < ex.deltas.size(); ++i) {
    Approximant ap;
    ap.stage = i + 1;
    ap.delta = ex.deltas[i];
    ap.bound = 2.0 * ap.delta;
    const Subcomplex& k = ex.levels[i];
    ap.compact_size = k.size();
    ap.pairs.assign(nv, Pair{CMat::Zero(f.n, f.n), CMat::Zero(f.n, f.n)});
    std::vector<bool> in_k(nv, false);
    if (!k.parent_vertex.empty()) {
      const OperatorField fk = restrict(f, k);
      const FactorResult fr = factor_field(fk, opt.bundle);
      if (!fr.factored) fail(ErrorKind::ObstructedOnCompact, "line bundle is nontrivial on K_" + std::to_string(ap.stage), {ap.stage});
      ap.residual_on_compact = fr.max_residual;
      for (std::size_t j = 0; j < k.size(); ++j) {
        ap.pairs[k.parent_vertex[j]] = fr.pairs[j];
        in_k[k.parent_vertex[j]] = true;
      }
      std::vector<std::size_t> dist, nearest;
      detail::nearest_sources(*f.base, k.parent_vertex, dist, nearest);
      const double cap = std::sqrt(ap.delta);
      for (std::size_t t = 0; t < nv; ++t) {
        if (in_k[t] || nearest[t] == std::numeric_limits<std::size_t>::max()) continue;
        const double s = std::max(0.0, 1.0 - static_cast<double>(dist[t]) / 2.0);
        CMat c = s * ap.pairs[nearest[t]].a, d = s * ap.pairs[nearest[t]].b;
        detail::cap_norm(c, cap);
        detail::cap_norm(d, cap);
        ap.pairs[t] = {std::move(c), std::move(d)};
      }
    }
    ap.errors.assign(nv, 0.0);
    parallel_for(nv, opt.bundle.field.threads, [&](std::size_t t) {
      const Pair& p = ap.pairs[t];
      if (in_k[t]) {
        const auto g = to_fibre_matrix(ElementaryRep(f.n, {p}));
        ap.errors[t] = std::sqrt(static_cast<double>(f.n)) * (g.matrix - f.fibres[t].matrix).norm();
        return;
      }
      // two certified upper bounds: the triangle inequality and a representation value
      const double triangle = rep.norms[t] + op_norm(p.a) * op_norm(p.b);
      double h = triangle;
      if (op_norm(p.a) > 0.0 && rep.norms[t] > 0.0) {
        const ElementaryRep diff(f.n, {Pair{factors[t].a, factors[t].b}, Pair{-p.a, p.b}});
        h = haagerup_upper(diff, opt.norm);
      }
      ap.errors[t] = std::min(triangle, h);
    });
    ap.error = nv ? *std::max_element(ap.errors.begin(), ap.errors.end()) : 0.0;
    out.push_back(std::move(ap));
  }
  return out;
}

struct Reconstruction {
  std::vector<Pair> pairs;         // (c(t), d(t)) with M_{c,d} = phi_t
  std::vector<double> inner;       // |<a_k(t), a(t)>_2| per vertex
  double min_inner = 0.0;
  double inner_floor = 0.0;        // 1 - 18 n eps^2
  double max_residual = 0.0;       // sup_t sqrt(n) ||F_t - F(M_{c,d})||_HS
  double max_distance = 0.0;       // sup_t lower estimate of ||phi_t - M_{a_k,b_k}||
  double max_alignment = 0.0;      // sup_t ||c(t) - a_k(t)||
};

struct ReconstructionOptions {
  double norm_tol = 1e-8;
  bool check_distance = true;
  NormOptions norm{};
  unsigned threads = 1;
};

inline double reconstruction_eps_limit(std::size_t n) { return 1.0 / std::sqrt(18.0 * static_cast<double>(n)); }

/// Global factorization of a normalized rank-one field from a nearby global
/// multiplication M_{a_k, b_k}: a'(t) = phase(<a_k(t), a(t)>_2) a(t).
inline Reconstruction reconstruct_global(const OperatorField& target, const std::vector<Pair>& near, double eps,
                                         const ReconstructionOptions& opt = {}) {
  const std::size_t n = target.n;
  if (!(eps > 0.0)) fail(ErrorKind::InvalidInput, "eps must be positive");
  if (eps >= reconstruction_eps_limit(n))
    fail(ErrorKind::EpsTooLarge, "eps must lie below (18 n)^{-1/2} = " + std::to_string(reconstruction_eps_limit(n)));
  if (near.size() != target.size()) fail(ErrorKind::DimensionMismatch, "one near pair per vertex required");
  Reconstruction out;
  out.inner_floor = 1.0 - 18.0 * static_cast<double>(n) * eps * eps;
  const std::size_t nv = target.size();
  out.pairs.resize(nv);
  out.inner.assign(nv, 0.0);
  std::vector<double> res(nv, 0.0), dist(nv, 0.0), align(nv, 0.0);
  std::vector<int> status(nv, 0);  // 1 precondition, 2 distance, 3 inner product
  parallel_for(nv, opt.threads, [&](std::size_t t) {
    const Pair& k = near[t];
    if (k.a.rows() != static_cast<Eigen::Index>(n) || k.b.rows() != static_cast<Eigen::Index>(n)) {
      status[t] = 1;
      return;
    }
    const RankOneFactor r = rank_one_factor(target.fibres[t], 1e-7);
    if (std::abs(op_norm(r.a) * op_norm(r.b) - 1.0) > opt.norm_tol || std::abs(op_norm(k.a) - 1.0) > opt.norm_tol ||
        std::abs(op_norm(k.b) - 1.0) > opt.norm_tol) {
      status[t] = 1;
      return;
    }
    if (opt.check_distance) {
      const ElementaryRep diff(n, {Pair{r.a, r.b}, Pair{-k.a, k.b}});
      dist[t] = amplification_norm(diff, 1, opt.norm);
      if (dist[t] >= eps) {
        status[t] = 2;
        return;
      }
    }
    const Complex ip = hs_inner(k.a, r.a);
    out.inner[t] = std::abs(ip);
    if (!(out.inner[t] > out.inner_floor) || out.inner[t] == 0.0) {
      status[t] = 3;
      return;
    }
    const Complex ph = ip / std::abs(ip);
    Pair p{ph * r.a, std::conj(ph) * r.b};
    const auto g = to_fibre_matrix(ElementaryRep(n, {p}));
    res[t] = std::sqrt(static_cast<double>(n)) * (g.matrix - target.fibres[t].matrix).norm();
    align[t] = op_norm(p.a - k.a);
    out.pairs[t] = std::move(p);
  });
  for (std::size_t t = 0; t < nv; ++t) {
    if (status[t] == 1)
      fail(ErrorKind::PreconditionViolated, "target must be normalized and near factors of unit norm", {t});
    if (status[t] == 2)
      fail(ErrorKind::PreconditionViolated, "target is not within eps of the near multiplication", {t});
    if (status[t] == 3) fail(ErrorKind::InnerProductVanished, "inner product below 1 - 18 n eps^2", {t});
  }
  out.min_inner = nv ? *std::min_element(out.inner.begin(), out.inner.end()) : 0.0;
  for (std::size_t t = 0; t < nv; ++t) {
    out.max_residual = std::max(out.max_residual, res[t]);
    out.max_distance = std::max(out.max_distance, dist[t]);
    out.max_alignment = std::max(out.max_alignment, align[t]);
  }
  return out;
}

enum class VerdictKind { InTM0, InClosureNotTM0, NotInClosure };

inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::InTM0: return "IN_TM0";
    case VerdictKind::InClosureNotTM0: return "IN_CLOSURE_NOT_TM0";
    case VerdictKind::NotInClosure: return "NOT_IN_CLOSURE";
  }
  return "?";
}

struct Verdict {
  VerdictKind kind = VerdictKind::NotInClosure;
  std::string reason;
  std::optional<std::size_t> obstructed_stage;
  std::vector<Approximant> stages;
};

/// On a finite complex compact equals global, so the verdict is IN_TM0 or
/// NOT_IN_CLOSURE; tower inputs reach IN_CLOSURE_NOT_TM0 (see telescope).
inline Verdict closure_verdict(const OperatorField& f, const Exhaustion& ex, const ApproximationOptions& opt = {}) {
  Verdict v;
  const FieldReport rep = validate(f, opt.bundle.field);
  if (!rep.ib1) {
    v.reason = "IB01 fails: some fibre has length > 1";
    return v;
  }
  if (!rep.ib0) {
    v.reason = "IB01 fails: field does not vanish on the boundary label";
    return v;
  }
  try {
    v.stages = approximate_by_multiplications(f, ex, opt);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ObstructedOnCompact) throw;
    v.obstructed_stage = e.where().empty() ? 0 : e.where().front();
    v.reason = "compact obstruction: line bundle nontrivial on K_" + std::to_string(*v.obstructed_stage);
    return v;
  }
  // the cozero set itself is compact here
  if (!rep.coz.empty()) {
    const FactorResult fr = factor_field(restrict(f, subcomplex(*f.base, rep.coz)), opt.bundle);
    if (!fr.factored) {
      v.reason = "compact obstruction: line bundle nontrivial on the cozero set";
      return v;
    }
  }
  v.kind = VerdictKind::InTM0;
  v.reason = "line bundle trivial on the cozero set";
  return v;
}

}  // namespace twosided

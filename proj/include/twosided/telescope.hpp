// SPDX-License-Identifier: Apache-2.0
//
// Mapping telescopes of circle maps z -> z^{d_n}: truncation meshes, line
// bundles as integer gluing data with the normal form m_n = k_n + d_n m_{n+1},
// trivial/phantom decisions, and the operator realization on truncations.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "twosided/closure.hpp"
#include "twosided/cohomology.hpp"
#include "twosided/complex.hpp"
#include "twosided/line_bundle.hpp"
#include "twosided/smith.hpp"

namespace twosided {

inline constexpr std::size_t kTruncationVertexCap = 100000;
inline constexpr std::size_t kTopLevelSize = 6;

struct TailRule {
  enum class Kind { Canonical, Constant };
  Kind kind = Kind::Canonical;
  std::int64_t d = 0;  // for Constant

  static TailRule parse(const std::string& s) {
    if (s == "canonical") return {};
    const std::string prefix = "constant:";
    if (s.rfind(prefix, 0) == 0) {
      try {
        std::size_t used = 0;
        const long long d = std::stoll(s.substr(prefix.size()), &used);
        if (used + prefix.size() == s.size() && d >= 2) return {Kind::Constant, d};
      } catch (const std::exception&) {
      }
      fail(ErrorKind::InvalidInput, "constant tail needs an integer degree >= 2: " + s);
    }
    fail(ErrorKind::UnsupportedTail, "unknown tail rule: " + s);
  }

  std::string str() const { return kind == Kind::Canonical ? "canonical" : "constant:" + std::to_string(d); }
};

/// Degrees d_1, d_2, ...: the explicit list, then the tail rule.
struct TelescopeTower {
  std::vector<std::int64_t> degrees;
  TailRule tail{};

  TelescopeTower() = default;
  explicit TelescopeTower(std::vector<std::int64_t> ds, TailRule t = {}) : degrees(std::move(ds)), tail(t) {
    for (std::size_t i = 0; i < degrees.size(); ++i)
      if (degrees[i] < 2) fail(ErrorKind::InvalidInput, "degrees must be >= 2", {i + 1});
  }

  static TelescopeTower canonical() { return TelescopeTower{}; }

  std::int64_t degree(std::size_t n) const {
    if (n == 0) fail(ErrorKind::InvalidInput, "levels are numbered from 1");
    if (n <= degrees.size()) return degrees[n - 1];
    return tail.kind == TailRule::Kind::Canonical ? static_cast<std::int64_t>(n) + 1 : tail.d;
  }

  /// L_N = 6 and L_n = L_{n+1} d_n; SizeCap past the vertex cap.
  std::vector<std::size_t> level_sizes(std::size_t levels) const {
    if (levels == 0) fail(ErrorKind::InvalidInput, "truncation needs at least one level");
    std::vector<std::size_t> sizes(levels);
    sizes[levels - 1] = kTopLevelSize;
    std::size_t total = kTopLevelSize;
    for (std::size_t n = levels - 1; n >= 1; --n) {
      const auto d = static_cast<std::size_t>(degree(n));
      if (sizes[n] > kTruncationVertexCap / d) fail(ErrorKind::SizeCap, "truncation exceeds the vertex cap", {levels});
      sizes[n - 1] = sizes[n] * d;
      total += sizes[n - 1];
      if (total > kTruncationVertexCap) fail(ErrorKind::SizeCap, "truncation exceeds the vertex cap", {levels});
    }
    return sizes;
  }
};

/// k_n = support[n-1] for n <= |support|, else tail_c; trailing tail values trimmed.
struct GluingData {
  std::vector<std::int64_t> support;
  std::int64_t tail_c = 0;

  GluingData() = default;
  GluingData(std::vector<std::int64_t> k, std::int64_t c = 0) : support(std::move(k)), tail_c(c) {
    while (!support.empty() && support.back() == tail_c) support.pop_back();
  }

  std::int64_t k(std::size_t n) const { return n >= 1 && n <= support.size() ? support[n - 1] : tail_c; }
  bool operator==(const GluingData&) const = default;
};

struct Truncation {
  ComplexPtr complex;
  std::size_t levels = 0;
  std::vector<std::size_t> sizes;    // L_n
  std::vector<std::size_t> offsets;  // first vertex of level n
  std::vector<std::size_t> level_of; // per vertex, counted from 1
  std::vector<double> angle;         // per vertex, 2 pi j / L_n
  std::optional<CohomologyGroup> h1, h2;

  std::size_t vertex(std::size_t n, std::size_t j) const { return offsets[n - 1] + j % sizes[n - 1]; }
};

/// Vertices of level n and n+1 with the cylinder triangles between them.
inline Subcomplex cylinder_block(const Truncation& t, std::size_t n) {
  return subcomplex(*t.complex, [&](std::size_t v) { return t.level_of[v] == n || t.level_of[v] == n + 1; });
}

/// Stacked mapping cylinders of j -> j mod L_{n+1} between level circles.
inline Truncation build_truncation(const TelescopeTower& tower, std::size_t levels, bool verify = true) {
  Truncation t;
  t.levels = levels;
  t.sizes = tower.level_sizes(levels);
  std::size_t total = 0;
  for (std::size_t n = 1; n <= levels; ++n) {
    t.offsets.push_back(total);
    for (std::size_t j = 0; j < t.sizes[n - 1]; ++j) {
      t.level_of.push_back(n);
      t.angle.push_back(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(t.sizes[n - 1]));
    }
    total += t.sizes[n - 1];
  }
  std::vector<Edge> edges;
  std::vector<Triangle> tris;
  for (std::size_t n = 1; n <= levels; ++n)
    for (std::size_t j = 0; j < t.sizes[n - 1]; ++j) edges.push_back({t.vertex(n, j), t.vertex(n, j + 1)});
  for (std::size_t n = 1; n < levels; ++n)
    for (std::size_t j = 0; j < t.sizes[n - 1]; ++j) {
      const std::size_t lo = t.vertex(n, j), lo1 = t.vertex(n, j + 1);
      const std::size_t up = t.vertex(n + 1, j), up1 = t.vertex(n + 1, j + 1);
      edges.push_back({lo, up});
      edges.push_back({lo, up1});
      tris.push_back({lo, lo1, up1});
      tris.push_back({lo, up, up1});
    }
  t.complex = share(BaseComplex(total, std::move(edges), std::move(tris)));
  if (verify) {
    const CochainComplex cc(t.complex);
    t.h1 = cc.group(1);
    t.h2 = cc.group(2);
    if (t.h1->free_rank != 1 || !t.h1->torsion.empty() || !t.h2->is_zero())
      fail(ErrorKind::InvalidComplex, "truncation cohomology differs from the circle's", {levels});
  }
  return t;
}

namespace detail {

/// Level windings W_n with W_n - d_n W_{n+1} = k_n (n < N); the free top
/// winding centres them so each level resolves its own winding.
inline std::vector<std::int64_t> level_windings(const TelescopeTower& tower, const Truncation& t,
                                                const GluingData& k) {
  const std::size_t N = t.levels;
  std::vector<double> ratio(N, 0.0);  // A_n / P_n with W_N = 0
  std::vector<std::int64_t> base(N, 0), scale(N, 1);
  for (std::size_t n = N - 1; n >= 1; --n) {
    const std::int64_t d = tower.degree(n);
    base[n - 1] = k.k(n) + d * base[n];
    scale[n - 1] = d * scale[n];
  }
  double lo = 0.0, hi = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    ratio[n] = static_cast<double>(base[n]) / static_cast<double>(scale[n]);
    lo = std::min(lo, ratio[n]);
    hi = std::max(hi, ratio[n]);
  }
  const auto top = static_cast<std::int64_t>(std::llround(-(lo + hi) / 2.0));
  std::vector<std::int64_t> w(N);
  for (std::size_t n = 0; n < N; ++n) {
    w[n] = base[n] + scale[n] * top;
    // |W| 2 pi / L < pi keeps the wrapped level phases faithful
    if (2 * std::abs(w[n]) >= static_cast<std::int64_t>(t.sizes[n]))
      fail(ErrorKind::SizeCap, "gluing windings exceed the level resolution", {n + 1});
  }
  return w;
}

}  // namespace detail

/// C^1-valued section e^{i W_n angle} on level n.
inline PhaseSection bundle_from_gluing(const TelescopeTower& tower, const Truncation& t, const GluingData& k,
                                       double rho = kDefaultOverlapFloor) {
  const auto w = detail::level_windings(tower, t, k);
  std::vector<CMat> vals;
  for (std::size_t v = 0; v < t.level_of.size(); ++v) {
    CMat z(1, 1);
    z(0, 0) = std::polar(1.0, static_cast<double>(w[t.level_of[v] - 1]) * t.angle[v]);
    vals.push_back(std::move(z));
  }
  return make_section(t.complex, std::move(vals), rho);
}

/// Winding of the section around level n from the wrapped edge phases.
inline std::int64_t level_winding(const PhaseSection& s, const Truncation& t, std::size_t n) {
  double sum = 0.0;
  for (std::size_t j = 0; j < t.sizes[n - 1]; ++j) sum += oriented_phase(s, t.vertex(n, j), t.vertex(n, j + 1));
  return -std::llround(sum / (2.0 * std::numbers::pi));
}

/// Relative windings k_n = W_n - d_n W_{n+1} of the cylinders n < N.
inline GluingData extract_gluing(const TelescopeTower& tower, const Truncation& t, const PhaseSection& s) {
  if (s.size() != t.complex->vertex_count())
    fail(ErrorKind::DimensionMismatch, "section does not live on this truncation");
  std::vector<std::int64_t> w(t.levels);
  for (std::size_t n = 1; n <= t.levels; ++n) w[n - 1] = level_winding(s, t, n);
  std::vector<std::int64_t> k;
  for (std::size_t n = 1; n < t.levels; ++n) k.push_back(w[n - 1] - tower.degree(n) * w[n]);
  return GluingData(std::move(k), 0);
}

/// (m_1, ..., m_{N+1}) with m_{N+1} = 0 and m_n = k_n + d_n m_{n+1}.
inline std::vector<BigInt> truncation_trivialization(const TelescopeTower& tower, std::size_t N,
                                                     const GluingData& k) {
  std::vector<BigInt> m(N + 1, 0);
  for (std::size_t n = N; n >= 1; --n) m[n - 1] = BigInt(k.k(n)) + BigInt(tower.degree(n)) * m[n];
  return m;
}

/// m_1 is forced to S_N modulo P_N = prod_{i<=N} d_i.
struct ResidueWindow {
  std::size_t N = 0;
  BigInt sum;      // S_N = sum_{j<=N} (prod_{i<j} d_i) k_j
  BigInt modulus;  // P_N
  BigInt residue;  // S_N mod P_N in [0, P_N)
};

inline std::vector<ResidueWindow> residue_windows(const TelescopeTower& tower, const GluingData& k, std::size_t upto) {
  std::vector<ResidueWindow> out;
  BigInt prefix = 1, sum = 0;
  for (std::size_t N = 1; N <= upto; ++N) {
    sum += prefix * k.k(N);
    prefix *= tower.degree(N);
    BigInt r = sum % prefix;
    if (r < 0) r += prefix;
    out.push_back({N, sum, prefix, r});
  }
  return out;
}

/// Integers |m_1| <= radius satisfying every window N <= window, by direct scan.
inline std::vector<std::int64_t> exhaustive_gauge_search(const TelescopeTower& tower, const GluingData& k,
                                                         std::size_t window, std::int64_t radius) {
  const auto ws = residue_windows(tower, k, window);
  std::vector<std::int64_t> mods, res;
  for (const auto& w : ws) {
    if (w.modulus > BigInt(std::numeric_limits<std::int64_t>::max() / 4))
      fail(ErrorKind::SizeCap, "window modulus exceeds 64 bits", {w.N});
    mods.push_back(static_cast<std::int64_t>(w.modulus));
    res.push_back(static_cast<std::int64_t>(w.residue));
  }
  std::vector<std::int64_t> survivors;
  for (std::int64_t m = -radius; m <= radius; ++m) {
    bool ok = true;
    for (std::size_t i = 0; i < mods.size() && ok; ++i) {
      std::int64_t r = m % mods[i];
      if (r < 0) r += mods[i];
      ok = r == res[i];
    }
    if (ok) survivors.push_back(m);
  }
  return survivors;
}

struct TowerDecision {
  bool trivial = false;
  std::vector<BigInt> gauge;  // m_1 .. m_{M+1}; m_n = tail_gauge beyond
  BigInt tail_gauge = 0;
  std::vector<ResidueWindow> windows;
  std::optional<std::pair<std::size_t, std::size_t>> contradiction;  // window pair (N, N+1)
  BigInt excluded_radius = 0;  // no |m_1| below this satisfies the pair
  std::string reason;

  BigInt gauge_at(std::size_t n) const { return n >= 1 && n <= gauge.size() ? gauge[n - 1] : tail_gauge; }
};

/// Trivial iff an integer gauge solves m_n = k_n + d_n m_{n+1} for all n.
inline TowerDecision is_globally_trivial(const TelescopeTower& tower, const GluingData& k) {
  TowerDecision out;
  const std::size_t M = std::max(k.support.size(), tower.degrees.size());
  const std::int64_t c = k.tail_c;
  std::optional<BigInt> tail;
  if (tower.tail.kind == TailRule::Kind::Canonical) {
    if (c == 0) tail = BigInt(0);
  } else {
    const std::int64_t d = tower.tail.d;
    if (c % (d - 1) == 0) tail = BigInt(-c / (d - 1));
  }
  if (tail) {
    out.trivial = true;
    out.tail_gauge = *tail;
    out.gauge.assign(M + 1, *tail);
    for (std::size_t n = M; n >= 1; --n) out.gauge[n - 1] = BigInt(k.k(n)) + BigInt(tower.degree(n)) * out.gauge[n];
    out.reason = tower.tail.kind == TailRule::Kind::Canonical
                     ? "tail c = 0: back-substitution from beyond the support"
                     : "(d - 1) divides c: constant gauge on the tail";
    return out;
  }
  if (tower.tail.kind == TailRule::Kind::Constant) {
    out.windows = residue_windows(tower, k, M + 2);
    out.reason = "constant degree " + std::to_string(tower.tail.d) + ": the tail gauge deviation from -c/(d-1) " +
                 "is divided by d at every level, so only the non-integer fixed point survives";
    return out;
  }
  // canonical tail: |S_N| / P_N -> 0 forces m_1 = S_N for all large N, yet S_N keeps moving
  const std::size_t last = std::max<std::size_t>(5, M + 2);
  out.windows = residue_windows(tower, k, last);
  const auto& a = out.windows[last - 2];
  const auto& b = out.windows[last - 1];
  out.contradiction = std::make_pair(a.N, b.N);
  out.excluded_radius = std::min(a.modulus - abs(a.sum), b.modulus - abs(b.sum));
  if (out.excluded_radius < 0) out.excluded_radius = 0;
  out.reason = "phantom: m_1 = " + a.sum.str() + " (mod " + a.modulus.str() + ") and m_1 = " + b.sum.str() +
               " (mod " + b.modulus.str() + "); any |m_1| < " + out.excluded_radius.str() +
               " would equal both, and the forced values grow without bound";
  return out;
}

inline Verdict tower_verdict(const TowerDecision& d) {
  Verdict v;
  v.kind = d.trivial ? VerdictKind::InTM0 : VerdictKind::InClosureNotTM0;
  v.reason = d.trivial ? "bundle globally trivial" : "phantom bundle: trivial on every truncation, not globally";
  return v;
}

struct DemoStage {
  std::size_t levels = 0;
  std::size_t vertices = 0;
  BigInt m1;
  bool lengths_one = false;
  bool completely_positive = false;
  bool gluing_roundtrip = false;
  std::vector<Approximant> approximants;
  double worst_ratio = 0.0;  // max error / (2 delta_n)
};

struct DemoReport {
  TelescopeTower tower;
  GluingData k;
  std::vector<DemoStage> stages;
  bool m1_increasing = false;
  bool errors_within = false;
};

struct DemoOptions {
  double mix = 0.3;  // a = sqrt(h) cos(mix) s, b = sqrt(h) sin(mix) s
  ApproximationOptions approx{};
};

/// phi = M_{a,a*} + M_{b,b*} with a, b in the embedded gluing line and
/// norm 1.5 * 2^{-n} on level n.
inline OperatorField phantom_family_field(const TelescopeTower& tower, const Truncation& t, const GluingData& k,
                                          double mix = 0.3) {
  const PhaseSection emb = embed_line_in_matrices(bundle_from_gluing(tower, t, k), 2);
  std::vector<CMat> a, b;
  for (std::size_t v = 0; v < emb.size(); ++v) {
    const double h = 1.5 * std::ldexp(1.0, -static_cast<int>(t.level_of[v]));
    a.push_back(std::sqrt(h) * std::cos(mix) * emb.values[v]);
    b.push_back(std::sqrt(h) * std::sin(mix) * emb.values[v]);
  }
  return phi_from_two_sections(t.complex, a, b);
}

/// Operator realization on truncations 1..max_levels with stagewise
/// approximants for delta_n = 2^{-n}.
inline DemoReport phantom_operator_demo(const TelescopeTower& tower, std::size_t max_levels, const GluingData& k,
                                        const DemoOptions& opt = {}) {
  DemoReport rep{tower, k, {}, true, true};
  for (std::size_t N = 1; N <= max_levels; ++N) {
    const Truncation t = build_truncation(tower, N);
    const PhaseSection line = bundle_from_gluing(tower, t, k);
    const OperatorField f = phantom_family_field(tower, t, k, opt.mix);
    DemoStage st;
    st.levels = N;
    st.vertices = t.complex->vertex_count();
    st.m1 = truncation_trivialization(tower, N, k).front();
    st.lengths_one = std::all_of(f.fibres.begin(), f.fibres.end(), [](const FibreOperator& g) { return length(g) == 1; });
    st.completely_positive =
        std::all_of(f.fibres.begin(), f.fibres.end(), [](const FibreOperator& g) { return is_completely_positive(g); });
    std::vector<std::int64_t> head;
    for (std::size_t n = 1; n < N; ++n) head.push_back(k.k(n));
    st.gluing_roundtrip = extract_gluing(tower, t, line) == GluingData(head, 0);
    std::vector<double> deltas;
    for (std::size_t n = 1; n <= N; ++n) deltas.push_back(std::ldexp(1.0, -static_cast<int>(n)));
    st.approximants = approximate_by_multiplications(f, sublevel_exhaustion(f, deltas, opt.approx.bundle.field), opt.approx);
    for (const auto& ap : st.approximants) st.worst_ratio = std::max(st.worst_ratio, ap.error / ap.bound);
    rep.errors_within = rep.errors_within && st.worst_ratio <= 1.0;
    if (!rep.stages.empty() && !(st.m1 > rep.stages.back().m1)) rep.m1_increasing = false;
    rep.stages.push_back(std::move(st));
  }
  return rep;
}

}  // namespace twosided

// SPDX-License-Identifier: Apache-2.0
//
// JSON encoding of complexes, matrices, fields, sections and telescope data.
// Complex numbers are [re, im] pairs; matrices are {"n", "entries"} in row-major
// order ({"rows", "cols", "entries"} when not square). Readers also take a
// plain list of rows.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "twosided/cohomology.hpp"
#include "twosided/complex.hpp"
#include "twosided/field.hpp"
#include "twosided/line_bundle.hpp"
#include "twosided/telescope.hpp"

namespace twosided::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchema = 1;

namespace detail {

[[noreturn]] inline void bad(const std::string& what) { fail(ErrorKind::InvalidInput, what); }

inline const Json& member(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline std::size_t index(const Json& j, const char* what) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) bad(std::string(what) + " must be a nonnegative integer");
  return j.get<std::size_t>();
}

inline double real(const Json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  return j.get<double>();
}

// Per-vertex data given as a list or as an object keyed by vertex index.
inline std::vector<const Json*> per_vertex(const Json& j, std::size_t nv, const char* what) {
  std::vector<const Json*> out(nv, nullptr);
  if (j.is_array()) {
    if (j.size() != nv) bad(std::string(what) + " must have one entry per vertex");
    for (std::size_t v = 0; v < nv; ++v) out[v] = &j[v];
    return out;
  }
  if (!j.is_object()) bad(std::string(what) + " must be a list or an object keyed by vertex");
  for (const auto& [key, val] : j.items()) {
    std::size_t v = 0;
    try {
      std::size_t used = 0;
      v = std::stoul(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      bad(std::string(what) + " key '" + key + "' is not a vertex index");
    }
    if (v >= nv) fail(ErrorKind::InvalidComplex, std::string(what) + " vertex out of range", {v});
    if (out[v]) bad(std::string(what) + " lists a vertex twice");
    out[v] = &val;
  }
  for (std::size_t v = 0; v < nv; ++v)
    if (!out[v]) bad(std::string(what) + " is missing vertex " + std::to_string(v));
  return out;
}

inline const Json& mesh_member(const Json& j) { return j.contains("mesh") ? j["mesh"] : member(j, "complex"); }

}  // namespace detail

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex scalar_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) detail::bad("complex number must be [re, im]");
  return {detail::real(j[0], "real part"), detail::real(j[1], "imaginary part")};
}

inline Json to_json(const CMat& m) {
  Json j;
  if (m.rows() == m.cols()) {
    j["n"] = m.rows();
  } else {
    j["rows"] = m.rows();
    j["cols"] = m.cols();
  }
  Json entries = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) entries.push_back(to_json(m(i, k)));
  j["entries"] = std::move(entries);
  return j;
}

inline CMat cmat_from_json(const Json& j) {
  CMat m;
  if (j.is_object()) {
    std::size_t r = 0, c = 0;
    if (j.contains("n")) {
      r = c = detail::index(j["n"], "n");
    } else {
      r = detail::index(detail::member(j, "rows"), "rows");
      c = detail::index(detail::member(j, "cols"), "cols");
    }
    const Json& e = detail::member(j, "entries");
    if (r == 0 || c == 0) detail::bad("matrix dimensions must be positive");
    if (!e.is_array() || e.size() != r * c) detail::bad("matrix entries must list rows * cols values");
    m.resize(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t k = 0; k < c; ++k) m(i, k) = scalar_from_json(e[i * c + k]);
  } else {
    if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) detail::bad("matrix must be a nonempty list of rows");
    const std::size_t r = j.size(), c = j[0].size();
    m.resize(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (std::size_t i = 0; i < r; ++i) {
      if (!j[i].is_array() || j[i].size() != c) detail::bad("matrix rows must have equal length");
      for (std::size_t k = 0; k < c; ++k) m(i, k) = scalar_from_json(j[i][k]);
    }
  }
  if (!all_finite(m)) detail::bad("matrix entries must be finite");
  return m;
}

inline Json to_json(const BaseComplex& c) {
  Json j;
  j["vertices"] = c.vertex_count();
  Json tris = Json::array();
  for (const auto& t : c.triangles()) tris.push_back({t[0], t[1], t[2]});
  // edges outside every triangle
  std::vector<bool> covered(c.edge_count(), false);
  for (const auto& t : c.triangles())
    for (int i = 0; i < 3; ++i) covered[*c.edge(t[i], t[(i + 1) % 3])] = true;
  Json free = Json::array();
  for (std::size_t e = 0; e < c.edge_count(); ++e)
    if (!covered[e]) free.push_back({c.edges()[e][0], c.edges()[e][1]});
  j["edges"] = std::move(free);
  j["triangles"] = std::move(tris);
  Json labels = Json::object();
  for (const auto& [name, vs] : c.labels()) labels[name] = vs;
  j["labels"] = std::move(labels);
  return j;
}

inline ComplexPtr read_complex(const Json& j) {
  const std::size_t nv = detail::index(detail::member(j, "vertices"), "vertices");
  std::vector<Triangle> tris;
  std::vector<Edge> edges;
  if (j.contains("triangles")) {
    if (!j["triangles"].is_array()) detail::bad("triangles must be a list");
    for (const auto& t : j["triangles"]) {
      if (!t.is_array() || t.size() != 3) detail::bad("triangle must list three vertices");
      tris.push_back({detail::index(t[0], "vertex"), detail::index(t[1], "vertex"), detail::index(t[2], "vertex")});
    }
  }
  if (j.contains("edges")) {
    if (!j["edges"].is_array()) detail::bad("edges must be a list");
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() != 2) detail::bad("edge must list two vertices");
      edges.push_back({detail::index(e[0], "vertex"), detail::index(e[1], "vertex")});
    }
  }
  Labels labels;
  if (j.contains("labels")) {
    if (!j["labels"].is_object()) detail::bad("labels must be an object");
    for (const auto& [name, vs] : j["labels"].items()) {
      if (!vs.is_array()) detail::bad("label '" + name + "' must be a list");
      auto& out = labels[name];
      for (const auto& v : vs) out.push_back(detail::index(v, "label vertex"));
    }
  }
  for (const auto& t : tris)
    for (auto v : t)
      if (v >= nv) fail(ErrorKind::InvalidComplex, "triangle vertex out of range");
  for (const auto& e : edges)
    if (e[0] >= nv || e[1] >= nv) fail(ErrorKind::InvalidComplex, "edge endpoint out of range");
  return share(BaseComplex::from_triangles(nv, std::move(tris), std::move(edges), std::move(labels)));
}

inline Json to_json(const OperatorField& f) {
  Json j;
  j["schema"] = kSchema;
  j["kind"] = "field";
  j["mesh"] = to_json(*f.base);
  j["n"] = f.n;
  if (std::isfinite(f.modulus)) j["modulus"] = f.modulus;
  Json fs = Json::object();
  for (std::size_t v = 0; v < f.fibres.size(); ++v) fs[std::to_string(v)] = to_json(f.fibres[v].matrix);
  j["fibres"] = std::move(fs);
  return j;
}

inline ElementaryRep rep_from_json(const Json& j) {
  const Json& ps = detail::member(j, "pairs");
  if (!ps.is_array() || ps.empty()) detail::bad("pairs must be a nonempty list");
  std::vector<Pair> pairs;
  for (const auto& p : ps) pairs.push_back({cmat_from_json(detail::member(p, "a")), cmat_from_json(detail::member(p, "b"))});
  const auto n = static_cast<std::size_t>(pairs.front().a.rows());
  for (const auto& p : pairs) {
    require_square(p.a, "a");
    require_same_dim(p.a, pairs.front().a);
    require_same_dim(p.a, p.b);
  }
  if (j.contains("n") && detail::index(j["n"], "n") != n) fail(ErrorKind::DimensionMismatch, "pair factors must be n x n");
  return ElementaryRep(n, std::move(pairs));
}

inline Json to_json(const ElementaryRep& r) {
  Json ps = Json::array();
  for (const auto& p : r.pairs) ps.push_back({{"a", to_json(p.a)}, {"b", to_json(p.b)}});
  return {{"n", r.n}, {"pairs", ps}};
}

/// Fibres as {"fibres": {vertex: matrix}} (list also accepted), each entry a
/// matrix, {"matrix": F} or an ElementaryRep; or {"pairs_field": {vertex: rep}}.
inline OperatorField field_from_json(const Json& j) {
  const ComplexPtr base = read_complex(detail::mesh_member(j));
  const std::size_t n = detail::index(detail::member(j, "n"), "n");
  if (n == 0) detail::bad("n must be positive");
  const bool by_pairs = j.contains("pairs_field");
  const auto entries =
      detail::per_vertex(by_pairs ? j["pairs_field"] : detail::member(j, "fibres"), base->vertex_count(), "fibres");
  std::vector<FibreOperator> fibres;
  for (const Json* f : entries) {
    if (by_pairs || (f->is_object() && f->contains("pairs"))) {
      const ElementaryRep rep = rep_from_json(*f);
      if (rep.n != n) fail(ErrorKind::DimensionMismatch, "pair factors must be n x n");
      fibres.push_back(to_fibre_matrix(rep));
    } else {
      const CMat m = cmat_from_json(f->is_object() && f->contains("matrix") ? (*f)["matrix"] : *f);
      if (m.rows() != static_cast<Eigen::Index>(n * n) || m.cols() != m.rows())
        fail(ErrorKind::DimensionMismatch, "fibre matrix must be n^2 x n^2");
      fibres.push_back(FibreOperator{n, m});
    }
  }
  const double mod = j.contains("modulus") ? detail::real(j["modulus"], "modulus")
                                           : std::numeric_limits<double>::infinity();
  return OperatorField(base, n, std::move(fibres), mod);
}

inline Json to_json(const PhaseSection& s) {
  Json j;
  j["schema"] = kSchema;
  j["kind"] = "section";
  j["mesh"] = to_json(*s.base);
  j["n"] = s.values.empty() ? 0 : s.values.front().rows();
  j["rho"] = s.rho;
  Json vs = Json::object();
  for (std::size_t v = 0; v < s.values.size(); ++v) vs[std::to_string(v)] = to_json(s.values[v]);
  j["values"] = std::move(vs);
  j["min_overlap"] = s.min_overlap();
  return j;
}

/// `rho` applies when the section carries no floor of its own.
inline PhaseSection section_from_json(const Json& j, double rho) {
  const ComplexPtr base = read_complex(detail::mesh_member(j));
  std::vector<CMat> values;
  for (const Json* v : detail::per_vertex(detail::member(j, "values"), base->vertex_count(), "values"))
    values.push_back(cmat_from_json(*v));
  if (j.contains("n"))
    for (const auto& v : values)
      if (v.rows() != static_cast<Eigen::Index>(detail::index(j["n"], "n")))
        fail(ErrorKind::DimensionMismatch, "section values must have n rows");
  const double floor = j.contains("rho") ? detail::real(j["rho"], "rho") : rho;
  return make_section(base, std::move(values), floor);
}

inline Json to_json(const ChernCocycle& cc) {
  Json tris = Json::array();
  for (const auto& t : cc.base->triangles()) tris.push_back({t[0], t[1], t[2]});
  return {{"triangles", tris}, {"w", cc.w}};
}

inline Json big_json(const BigInt& x) {
  if (x >= std::numeric_limits<std::int64_t>::min() && x <= std::numeric_limits<std::int64_t>::max())
    return static_cast<std::int64_t>(x);
  return x.str();
}

inline Json big_json(const std::vector<BigInt>& xs) {
  Json a = Json::array();
  for (const auto& x : xs) a.push_back(big_json(x));
  return a;
}

inline Json to_json(const CohomologyGroup& g) {
  Json torsion = Json::array();
  for (const auto& t : g.torsion) torsion.push_back(big_json(t));
  return {{"degree", g.degree}, {"group", g.describe()}, {"free_rank", g.free_rank}, {"torsion", torsion}};
}

inline Json to_json(const CohomologyClass& c) {
  return {{"group", to_json(c.group)},
          {"free_coords", big_json(c.free_coords)},
          {"torsion_coords", big_json(c.torsion_coords)},
          {"zero", c.is_zero()}};
}

inline TelescopeTower tower_from_json(const Json& j) {
  std::vector<std::int64_t> ds;
  if (j.contains("degrees")) {
    if (!j["degrees"].is_array()) detail::bad("degrees must be a list");
    for (const auto& d : j["degrees"]) {
      if (!d.is_number_integer()) detail::bad("degrees must be integers");
      ds.push_back(d.get<std::int64_t>());
    }
  }
  TailRule tail;
  if (j.contains("tail")) {
    if (!j["tail"].is_string()) detail::bad("tail must be a string");
    tail = TailRule::parse(j["tail"].get<std::string>());
  }
  return TelescopeTower(std::move(ds), tail);
}

inline Json to_json(const TelescopeTower& t) { return {{"degrees", t.degrees}, {"tail", t.tail.str()}}; }

inline GluingData gluing_from_json(const Json& j) {
  std::vector<std::int64_t> k;
  if (j.contains("k")) {
    if (!j["k"].is_array()) detail::bad("k must be a list");
    for (const auto& x : j["k"]) {
      if (!x.is_number_integer()) detail::bad("k entries must be integers");
      k.push_back(x.get<std::int64_t>());
    }
  }
  std::int64_t c = 0;
  if (j.contains("tail_c")) {
    if (!j["tail_c"].is_number_integer()) detail::bad("tail_c must be an integer");
    c = j["tail_c"].get<std::int64_t>();
  }
  return GluingData(std::move(k), c);
}

inline Json to_json(const GluingData& g) { return {{"k", g.support}, {"tail_c", g.tail_c}}; }

}  // namespace twosided::io

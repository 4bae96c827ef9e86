// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Reads and writes JSON; exit codes: 0 ok,
// 2 invalid input, 3 precondition violated, 4 obstruction found.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "twosided/json_io.hpp"
#include "twosided/twosided.hpp"

namespace ts = twosided;
using ts::io::Json;
using ts::io::to_json;

namespace {

enum Exit { kOk = 0, kInput = 2, kPrecondition = 3, kObstruction = 4 };

int exit_code(ts::ErrorKind k) {
  using ts::ErrorKind;
  switch (k) {
    case ErrorKind::NontrivialClass:
    case ErrorKind::ObstructedOnCompact:
      return kObstruction;
    case ErrorKind::PreconditionViolated:
    case ErrorKind::EpsTooLarge:
    case ErrorKind::InnerProductVanished:
    case ErrorKind::OverlapTooSmall:
    case ErrorKind::MarginTooSmall:
    case ErrorKind::NotRankOne:
    case ErrorKind::VanishingFibre:
    case ErrorKind::LengthExceeded:
    case ErrorKind::ZeroOperator:
    case ErrorKind::BoundViolated:
    case ErrorKind::NotCauchy:
    case ErrorKind::IndependenceLost:
    case ErrorKind::SpanNotLine:
    case ErrorKind::CoverDoesNotSpan:
      return kPrecondition;
    default:
      return kInput;
  }
}

struct Settings {
  std::string input;
  std::string generate;
  std::string out;
  double tol = ts::kDefaultRankTol;
  double rho = ts::kDefaultOverlapFloor;
  double margin = ts::kDefaultMarginFloor;
  double zero_tol = 1e-12;
  std::uint64_t seed = 0;
  unsigned threads = 1;

  ts::FieldOptions field() const {
    ts::FieldOptions f;
    f.rank_tol = tol;
    f.zero_tol_rel = zero_tol;
    f.threads = threads;
    f.norm.seed = seed;
    return f;
  }
  ts::BundleOptions bundle() const { return {rho, margin, field()}; }
  ts::NormOptions norm() const {
    ts::NormOptions n;
    n.seed = seed;
    return n;
  }
};

void check_ranges(const Settings& s) {
  if (!(s.tol > 0.0 && s.tol < 1.0)) ts::fail(ts::ErrorKind::InvalidInput, "--tol must lie in (0, 1)");
  if (!(s.rho > 0.0 && s.rho < 1.0)) ts::fail(ts::ErrorKind::InvalidInput, "--rho must lie in (0, 1)");
  if (!(s.margin > 0.0 && s.margin < std::numbers::pi)) ts::fail(ts::ErrorKind::InvalidInput, "--margin must lie in (0, pi)");
  if (!(s.zero_tol >= 0.0 && s.zero_tol < 1.0)) ts::fail(ts::ErrorKind::InvalidInput, "--zero-tol must lie in [0, 1)");
  if (s.threads == 0) ts::fail(ts::ErrorKind::InvalidInput, "--threads must be positive");
}

Json load(const std::string& path) {
  std::ifstream in(path);
  if (!in) ts::fail(ts::ErrorKind::InvalidInput, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    ts::fail(ts::ErrorKind::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

void emit(const Settings& s, const Json& report) {
  const std::string text = report.dump(2) + "\n";
  if (s.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream o(s.out, std::ios::binary);
    if (!o) ts::fail(ts::ErrorKind::InvalidInput, "cannot write " + s.out);
    o << text;
  }
}

Json header(const std::string& command, const Settings& s) {
  Json j;
  j["schema"] = ts::io::kSchema;
  j["command"] = command;
  j["seed"] = s.seed;
  return j;
}

// --- generators --------------------------------------------------------------

struct Spec {
  std::string name;
  std::vector<std::size_t> args;
};

Spec parse_spec(const std::string& g) {
  Spec sp;
  const auto colon = g.find(':');
  sp.name = g.substr(0, colon);
  if (colon != std::string::npos) {
    std::stringstream ss(g.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        const long v = std::stol(tok, &used);
        if (used != tok.size() || v < 0) throw std::invalid_argument(tok);
        sp.args.push_back(static_cast<std::size_t>(v));
      } catch (const std::exception&) {
        ts::fail(ts::ErrorKind::InvalidInput, "bad generator argument '" + tok + "'");
      }
    }
  }
  return sp;
}

std::size_t arg(const Spec& sp, std::size_t i, std::size_t fallback) { return i < sp.args.size() ? sp.args[i] : fallback; }

ts::Mesh mesh_for(const Spec& sp) {
  if (sp.name == "sphere") return ts::icosphere(static_cast<int>(arg(sp, 0, 1)));
  if (sp.name == "torus") return ts::torus(arg(sp, 0, 10), arg(sp, 1, 10));
  if (sp.name == "klein") return ts::klein(arg(sp, 0, 10), arg(sp, 1, 10));
  if (sp.name == "disc") return ts::disc(arg(sp, 0, 6));
  ts::fail(ts::ErrorKind::InvalidInput, "unknown generator '" + sp.name + "'");
}

ts::PhaseSection generated_section(const Settings& s) {
  const Spec sp = parse_spec(s.generate);
  if (sp.name == "telescope") {
    const ts::TelescopeTower tw;
    const auto t = ts::build_truncation(tw, arg(sp, 0, 3));
    return ts::bundle_from_gluing(tw, t, ts::GluingData({}, 1), s.rho);
  }
  const ts::Mesh m = mesh_for(sp);
  if (sp.name == "sphere") return ts::monopole_section(m, s.rho);
  if (sp.name == "torus" || sp.name == "klein")
    return ts::skyrmion_section(m.complex, ts::grid_uv(arg(sp, 0, 10), arg(sp, 1, 10)), {0.5, 0.5}, 0.4, s.rho);
  // disc: spinor tilting from the north pole at the centre to the equator at the rim
  std::vector<ts::CMat> vals;
  for (const auto& p : m.coords) {
    const double r = std::min(1.0, std::hypot(p[0], p[1]));
    vals.push_back(ts::bloch_spinor(std::numbers::pi / 2.0 * r, std::atan2(p[1], p[0])));
  }
  return ts::make_section(m.complex, std::move(vals), s.rho);
}

ts::Cover cover_for(const ts::BaseComplex& c, const std::string& kind, bool uniform) {
  ts::Cover cv = kind == "whole" ? ts::Cover::whole(c) : ts::Cover::vertex_stars(c);
  cv.uniform_weights = uniform;
  return cv;
}

ts::OperatorField generated_field(const Settings& s) {
  const Spec sp = parse_spec(s.generate);
  if (sp.name == "disc") return ts::decaying_disc_field(ts::disc(arg(sp, 0, 6)));
  if (sp.name == "telescope") {
    const ts::TelescopeTower tw;
    const auto t = ts::build_truncation(tw, arg(sp, 0, 3));
    return ts::phantom_family_field(tw, t, ts::GluingData({}, 1));
  }
  const ts::PhaseSection sec = ts::embed_line_in_matrices(generated_section(s), 2);
  // geometric weights underflow on large covers
  return ts::synthesize_operator(sec, cover_for(*sec.base, "stars", sec.size() > 40));
}

ts::OperatorField field_input(const Settings& s) {
  if (!s.generate.empty()) return generated_field(s);
  if (s.input.empty()) ts::fail(ts::ErrorKind::InvalidInput, "an input file or --generate is required");
  const Json j = load(s.input);
  return ts::io::field_from_json(j.contains("field") ? j["field"] : j);
}

ts::PhaseSection section_input(const Settings& s) {
  if (!s.generate.empty()) return generated_section(s);
  if (s.input.empty()) ts::fail(ts::ErrorKind::InvalidInput, "an input file or --generate is required");
  const Json in = load(s.input);
  // accept bare objects or reports wrapping them
  const Json& j = in.contains("section") ? in["section"] : in.contains("field") ? in["field"] : in;
  if (j.value("kind", "") == "field") return ts::extract_bundle(ts::io::field_from_json(j), s.bundle());
  return ts::io::section_from_json(j, s.rho);
}

// --- reports -----------------------------------------------------------------

Json stage_json(const ts::Approximant& a) {
  return {{"n", a.stage},         {"delta", a.delta},
          {"compact_size", a.compact_size}, {"error", a.error},
          {"bound", a.bound},     {"within", a.error <= a.bound},
          {"residual_on_compact", a.residual_on_compact}};
}

Json verdict_json(const ts::Verdict& v) {
  Json j{{"verdict", ts::to_string(v.kind)}, {"reason", v.reason}};
  j["obstructed_stage"] = v.obstructed_stage ? Json(*v.obstructed_stage) : Json(nullptr);
  Json st = Json::array();
  for (const auto& a : v.stages) st.push_back(stage_json(a));
  j["stages"] = std::move(st);
  return j;
}

Json decision_json(const ts::TowerDecision& d) {
  Json j{{"trivial", d.trivial}, {"verdict", ts::to_string(ts::tower_verdict(d).kind)}, {"reason", d.reason}};
  if (d.trivial) {
    j["gauge"] = ts::io::big_json(d.gauge);
    j["tail_gauge"] = ts::io::big_json(d.tail_gauge);
  }
  Json ws = Json::array();
  for (const auto& w : d.windows)
    ws.push_back({{"N", w.N}, {"sum", ts::io::big_json(w.sum)}, {"modulus", ts::io::big_json(w.modulus)}, {"residue", ts::io::big_json(w.residue)}});
  j["windows"] = std::move(ws);
  if (d.contradiction) {
    j["contradiction"] = {d.contradiction->first, d.contradiction->second};
    j["excluded_radius"] = ts::io::big_json(d.excluded_radius);
  }
  return j;
}

Json field_summary(const ts::FieldReport& r, std::size_t n, std::size_t vertices) {
  std::map<std::size_t, std::size_t> hist;
  for (auto l : r.lengths) ++hist[l];
  Json h = Json::object();
  for (const auto& [l, c] : hist) h[std::to_string(l)] = c;
  return {{"vertices", vertices},
          {"n", n},
          {"sup_norm", r.sup_norm},
          {"min_norm", r.min_norm},
          {"min_norm_on_coz", r.min_norm_on_coz},
          {"coz_size", r.coz.size()},
          {"length_histogram", h},
          {"ib1", r.ib1},
          {"nv", r.nv},
          {"ib0", r.ib0},
          {"flags", r.flags()},
          {"max_edge_jump", r.max_edge_jump}};
}

std::vector<std::int64_t> int_list(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      ts::fail(ts::ErrorKind::InvalidInput, "bad integer '" + tok + "'");
    }
  }
  return out;
}

struct TowerArgs {
  std::string tower_file, degrees, tail = "canonical", gluing_file, k;
  std::int64_t tail_c = 1;
  std::size_t levels = 4;

  ts::TelescopeTower tower() const {
    if (!tower_file.empty()) {
      const Json j = load(tower_file);
      return ts::io::tower_from_json(j.contains("tower") ? j["tower"] : j);
    }
    return ts::TelescopeTower(int_list(degrees), ts::TailRule::parse(tail));
  }
  ts::GluingData gluing() const {
    if (!gluing_file.empty()) {
      const Json j = load(gluing_file);
      return ts::io::gluing_from_json(j.contains("gluing") ? j["gluing"] : j);
    }
    return ts::GluingData(int_list(k), tail_c);
  }
};

// --- commands ----------------------------------------------------------------

int cmd_analyze(const Settings& s) {
  const ts::OperatorField f = field_input(s);
  Json j = header("analyze", s);
  j["report"] = field_summary(ts::validate(f, s.field()), f.n, f.size());
  emit(s, j);
  return kOk;
}

int cmd_extract(const Settings& s) {
  const ts::PhaseSection sec = ts::extract_bundle(field_input(s), s.bundle());
  Json j = header("extract", s);
  j["section"] = to_json(sec);
  emit(s, j);
  return kOk;
}

int cmd_chern(const Settings& s) {
  const ts::PhaseSection sec = section_input(s);
  const ts::ChernCocycle cc = ts::chern_cocycle(sec, s.margin);
  Json j = header("chern", s);
  j["triangles"] = cc.w.size();
  j["total"] = cc.total();
  j["margin"] = cc.margin;
  j["min_overlap"] = sec.min_overlap();
  j["class"] = to_json(ts::chern_class(cc));
  j["cocycle"] = to_json(cc);
  emit(s, j);
  return kOk;
}

int cmd_trivialize(const Settings& s) {
  const ts::PhaseSection sec = section_input(s);
  Json j = header("trivialize", s);
  const ts::ChernCocycle cc = ts::chern_cocycle(sec, s.margin);
  const ts::CohomologyClass k = ts::chern_class(cc);
  j["class"] = to_json(k);
  if (!k.is_zero()) {
    j["trivial"] = false;
    emit(s, j);
    return kObstruction;
  }
  const ts::Trivialization t = ts::trivialize(sec, s.margin);
  j["trivial"] = true;
  Json g = Json::array();
  for (const auto& z : t.gauge) g.push_back(to_json(z));
  j["gauge"] = std::move(g);
  j["tree_edges"] = t.tree_edges.size();
  j["max_residual"] = t.max_residual;
  emit(s, j);
  return kOk;
}

int cmd_factor(const Settings& s, bool with_pairs) {
  const ts::OperatorField f = field_input(s);
  const ts::FactorResult r = ts::factor_field(f, s.bundle());
  Json j = header("factor", s);
  j["factored"] = r.factored;
  j["class"] = to_json(r.klass);
  j["chern_total"] = r.cocycle.total();
  j["margin"] = r.cocycle.margin;
  if (r.factored) {
    j["max_residual"] = r.max_residual;
    if (with_pairs) {
      Json ps = Json::array();
      for (const auto& p : r.pairs) ps.push_back({{"a", to_json(p.a)}, {"b", to_json(p.b)}});
      j["pairs"] = std::move(ps);
    }
  }
  emit(s, j);
  return r.factored ? kOk : kObstruction;
}

int cmd_synthesize(const Settings& s, const std::string& cover, bool uniform) {
  ts::PhaseSection sec = section_input(s);
  if (!sec.matrix_valued()) sec = ts::embed_line_in_matrices(sec, std::max<std::size_t>(2, sec.rows()));
  const ts::OperatorField f = ts::synthesize_operator(sec, cover_for(*sec.base, cover, uniform));
  Json j = header("synthesize", s);
  j["field"] = to_json(f);
  emit(s, j);
  return kOk;
}

std::vector<double> stage_deltas(const ts::OperatorField& f, const Settings& s, std::size_t stages, bool absolute) {
  if (stages == 0) ts::fail(ts::ErrorKind::InvalidInput, "--stages must be positive");
  return absolute ? ts::default_deltas(1.0, stages) : ts::default_deltas(ts::validate(f, s.field()).sup_norm, stages);
}

int cmd_approximate(const Settings& s, std::size_t stages, bool absolute) {
  const ts::OperatorField f = field_input(s);
  const ts::Exhaustion ex = ts::sublevel_exhaustion(f, stage_deltas(f, s, stages, absolute), s.field());
  ts::ApproximationOptions opt{s.bundle(), s.norm()};
  Json j = header("approximate", s);
  try {
    const auto st = ts::approximate_by_multiplications(f, ex, opt);
    Json arr = Json::array();
    bool ok = true;
    for (const auto& a : st) {
      arr.push_back(stage_json(a));
      ok = ok && a.error <= a.bound;
    }
    j["stages"] = std::move(arr);
    j["all_within"] = ok;
  } catch (const ts::Error& e) {
    if (e.kind() != ts::ErrorKind::ObstructedOnCompact) throw;
    j["obstructed_stage"] = e.where().empty() ? Json(nullptr) : Json(e.where().front());
    j["message"] = e.what();
    emit(s, j);
    return kObstruction;
  }
  emit(s, j);
  return kOk;
}

int cmd_verdict(const Settings& s, std::size_t stages, bool absolute) {
  Json j = header("verdict", s);
  if (s.generate.empty() && !s.input.empty()) {
    const Json in = load(s.input);
    if (in.value("kind", "") == "telescope") {
      const auto d = ts::is_globally_trivial(ts::io::tower_from_json(ts::io::detail::member(in, "tower")),
                                             ts::io::gluing_from_json(ts::io::detail::member(in, "gluing")));
      j["verdict"] = ts::to_string(ts::tower_verdict(d).kind);
      j["decision"] = decision_json(d);
      emit(s, j);
      return kOk;
    }
  }
  const ts::OperatorField f = field_input(s);
  const ts::FieldReport r = ts::validate(f, s.field());
  ts::Exhaustion ex;
  if (r.ib1) ex = ts::sublevel_exhaustion(f, stage_deltas(f, s, stages, absolute), s.field());
  const ts::Verdict v = ts::closure_verdict(f, ex, {s.bundle(), s.norm()});
  j.update(verdict_json(v));
  emit(s, j);
  return kOk;
}

int cmd_telescope_build(const Settings& s, const TowerArgs& a) {
  const ts::TelescopeTower tw = a.tower();
  const ts::Truncation t = ts::build_truncation(tw, a.levels);
  Json j = header("telescope build", s);
  j["tower"] = to_json(tw);
  j["levels"] = a.levels;
  j["sizes"] = t.sizes;
  j["vertices"] = t.complex->vertex_count();
  j["edges"] = t.complex->edge_count();
  j["triangles"] = t.complex->triangle_count();
  j["euler"] = t.complex->euler_characteristic();
  Json blocks = Json::array();
  for (std::size_t n = 1; n < a.levels; ++n) blocks.push_back(ts::cylinder_block(t, n).complex->euler_characteristic());
  j["block_euler"] = std::move(blocks);
  j["H1"] = to_json(*t.h1);
  j["H2"] = to_json(*t.h2);
  emit(s, j);
  return kOk;
}

int cmd_telescope_decide(const Settings& s, const TowerArgs& a) {
  const ts::TelescopeTower tw = a.tower();
  const ts::GluingData g = a.gluing();
  const ts::TowerDecision d = ts::is_globally_trivial(tw, g);
  Json j = header("telescope decide", s);
  j["tower"] = to_json(tw);
  j["gluing"] = to_json(g);
  j.update(decision_json(d));
  emit(s, j);
  return kOk;
}

int cmd_telescope_demo(const Settings& s, const TowerArgs& a) {
  const ts::TelescopeTower tw = a.tower();
  const ts::GluingData g = a.gluing();
  ts::DemoOptions opt;
  opt.approx = {s.bundle(), s.norm()};
  const ts::DemoReport r = ts::phantom_operator_demo(tw, a.levels, g, opt);
  Json j = header("telescope demo", s);
  j["tower"] = to_json(tw);
  j["gluing"] = to_json(g);
  Json st = Json::array();
  for (const auto& x : r.stages) {
    Json ap = Json::array();
    for (const auto& y : x.approximants) ap.push_back(stage_json(y));
    st.push_back({{"levels", x.levels},
                  {"vertices", x.vertices},
                  {"m1", ts::io::big_json(x.m1)},
                  {"lengths_one", x.lengths_one},
                  {"completely_positive", x.completely_positive},
                  {"gluing_roundtrip", x.gluing_roundtrip},
                  {"worst_ratio", x.worst_ratio},
                  {"approximants", ap}});
  }
  j["stages"] = std::move(st);
  j["m1_increasing"] = r.m1_increasing;
  j["errors_within"] = r.errors_within;
  j["decision"] = decision_json(ts::is_globally_trivial(tw, g));
  emit(s, j);
  return kOk;
}

ts::ElementaryRep rep_input(const Settings& s) {
  if (!s.generate.empty()) {
    const Spec sp = parse_spec(s.generate);
    if (sp.name == "transpose") {
      const std::size_t n = arg(sp, 0, 2);
      std::vector<ts::Pair> ps;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) ps.push_back({ts::matrix_unit(n, i, k), ts::matrix_unit(n, i, k)});
      return ts::ElementaryRep(n, std::move(ps));
    }
    if (sp.name != "random") ts::fail(ts::ErrorKind::InvalidInput, "haagerup generators: random:n,l or transpose:n");
    ts::Rng rng(s.seed);
    return ts::random_rep(arg(sp, 0, 2), arg(sp, 1, 2), rng);
  }
  if (s.input.empty()) ts::fail(ts::ErrorKind::InvalidInput, "an input file or --generate is required");
  return ts::io::rep_from_json(load(s.input));
}

int cmd_haagerup(const Settings& s, std::size_t amp) {
  const ts::ElementaryRep rep = rep_input(s);
  const ts::NormOptions no = s.norm();
  const ts::HaagerupEstimate h = ts::haagerup_norm(rep, no);
  Json j = header("haagerup", s);
  j["n"] = rep.n;
  j["length"] = h.length;
  j["op_norm"] = ts::amplification_norm(rep, 1, no);
  j["haagerup_lower"] = h.lower;
  j["haagerup_upper"] = h.length <= 1 ? h.upper : ts::haagerup_upper(rep, no);
  j["profile"] = ts::amplification_profile(rep, std::max<std::size_t>(amp, 1), no);
  emit(s, j);
  return kOk;
}

int cmd_recover(const Settings& s, double eps_flag) {
  ts::CMat a, b, c, d;
  double eps = eps_flag;
  if (!s.generate.empty()) {
    const Spec sp = parse_spec(s.generate);
    if (sp.name != "random") ts::fail(ts::ErrorKind::InvalidInput, "recover generator: random:n");
    const std::size_t n = arg(sp, 0, 2);
    ts::Rng rng(s.seed);
    a = ts::random_unit_cmat(n, rng);
    b = ts::random_unit_cmat(n, rng);
    const ts::Complex mu = ts::random_phase(rng);
    c = mu * a + 0.01 * ts::random_unit_cmat(n, rng);
    d = std::conj(mu) * b + 0.01 * ts::random_unit_cmat(n, rng);
    c /= ts::op_norm(c);
    d /= ts::op_norm(d);
    if (!(eps > 0.0)) eps = std::min(ts::kRecoveryThreshold, ts::haagerup_distance_upper(a, b, c, d, s.norm()) * (1.0 + 1e-9));
  } else {
    if (s.input.empty()) ts::fail(ts::ErrorKind::InvalidInput, "an input file or --generate is required");
    const Json j = load(s.input);
    a = ts::io::cmat_from_json(ts::io::detail::member(j, "a"));
    b = ts::io::cmat_from_json(ts::io::detail::member(j, "b"));
    c = ts::io::cmat_from_json(ts::io::detail::member(j, "c"));
    d = ts::io::cmat_from_json(ts::io::detail::member(j, "d"));
    if (!(eps > 0.0)) eps = ts::io::detail::real(ts::io::detail::member(j, "eps"), "eps");
  }
  ts::RecoveryOptions ro;
  ro.norm = s.norm();
  const ts::RecoveryCertificate cert = ts::recover_pair(a, b, c, d, eps, ro);
  Json j = header("recover", s);
  j["mu"] = to_json(cert.mu);
  j["bound_a"] = cert.bound_a;
  j["bound_b"] = cert.bound_b;
  j["epsilon"] = cert.epsilon;
  j["ratio"] = cert.ratio();
  j["within"] = cert.ratio() < ts::kRecoveryConstant;
  emit(s, j);
  return kOk;
}

int cmd_cohomology(const Settings& s) {
  ts::ComplexPtr c;
  if (!s.generate.empty()) {
    const Spec sp = parse_spec(s.generate);
    if (sp.name == "telescope")
      c = ts::build_truncation(ts::TelescopeTower{}, arg(sp, 0, 3), false).complex;
    else if (sp.name == "cycle")
      c = ts::cycle(arg(sp, 0, 6)).complex;
    else
      c = mesh_for(sp).complex;
  } else {
    if (s.input.empty()) ts::fail(ts::ErrorKind::InvalidInput, "an input file or --generate is required");
    const Json j = load(s.input);
    c = ts::io::read_complex(j.contains("mesh") ? j["mesh"] : j.contains("complex") ? j["complex"] : j);
  }
  const ts::CochainComplex cc(c);
  Json j = header("cohomology", s);
  j["vertices"] = c->vertex_count();
  j["edges"] = c->edge_count();
  j["triangles"] = c->triangle_count();
  j["euler"] = c->euler_characteristic();
  j["H0"] = to_json(cc.group(0));
  j["H1"] = to_json(cc.group(1));
  j["H2"] = to_json(cc.group(2));
  emit(s, j);
  return kOk;
}

// Non-normative search: how close (in operator norm) a length-(l+1) operator
// with a small trailing tensor singular value sits to its best length-l truncation.
int cmd_question33(const Settings& s, std::size_t trials, std::size_t len, std::size_t n) {
  if (trials == 0 || len == 0 || n < 2) ts::fail(ts::ErrorKind::InvalidInput, "need trials > 0, length > 0, n >= 2");
  if (len + 1 > n * n) ts::fail(ts::ErrorKind::InvalidInput, "length + 1 exceeds n^2");
  ts::Rng rng(s.seed);
  const ts::NormOptions no = s.norm();
  Json samples = Json::array();
  double min_ratio = std::numeric_limits<double>::infinity(), max_ratio = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const double scale = std::ldexp(1.0, -static_cast<int>(1 + t % 10));
    ts::ElementaryRep rep = ts::random_rep(n, len, rng);
    rep.pairs.push_back({scale * ts::random_cmat(n, rng), ts::random_cmat(n, rng)});
    const ts::FibreOperator full = ts::to_fibre_matrix(rep);
    const Eigen::VectorXd sv = ts::tensor_singular_values(full);
    const ts::ElementaryRep minimal = ts::minimal_rep(full);
    ts::ElementaryRep tail(n, std::vector<ts::Pair>(minimal.pairs.begin() + static_cast<long>(std::min(len, minimal.pairs.size())),
                                                    minimal.pairs.end()));
    const double sigma = sv(static_cast<Eigen::Index>(len));
    const double op_gap = ts::amplification_norm(tail, 1, no);
    const double ratio = sigma > 0.0 ? op_gap / sigma : 0.0;
    min_ratio = std::min(min_ratio, ratio);
    max_ratio = std::max(max_ratio, ratio);
    samples.push_back({{"trial", t}, {"sigma_next", sigma}, {"op_distance_to_truncation", op_gap}, {"ratio", ratio}});
  }
  Json j = header("question33-experiment", s);
  j["normative"] = false;
  j["n"] = n;
  j["length"] = len;
  j["trials"] = trials;
  j["min_ratio"] = min_ratio;
  j["max_ratio"] = max_ratio;
  j["samples"] = std::move(samples);
  emit(s, j);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-sided multiplication fields over simplicial complexes"};
  app.require_subcommand(1);
  app.fallthrough();
  Settings s;
  app.add_option("--tol", s.tol, "rank tolerance for tensor singular values");
  app.add_option("--rho", s.rho, "overlap floor for adjacent section values");
  app.add_option("--margin", s.margin, "Chern margin floor");
  app.add_option("--zero-tol", s.zero_tol, "cozero threshold relative to the sup norm");
  app.add_option("--seed", s.seed, "random seed");
  app.add_option("--threads", s.threads, "worker threads");
  app.add_option("--out", s.out, "write the report here instead of stdout");
  app.add_option("--generate", s.generate,
                 "built-in input: sphere[:L] torus[:m,n] klein[:m,n] disc[:k] telescope:N random:n,l transpose:n");

  std::map<std::string, CLI::App*> cmds;
  auto sub = [&](const std::string& name, const std::string& help) {
    CLI::App* c = app.add_subcommand(name, help);
    c->add_option("input", s.input, "input JSON file");
    cmds[name] = c;
    return c;
  };
  sub("analyze", "validate a field and report its flags");
  sub("extract", "extract the line bundle of a rank-one field");
  sub("chern", "Chern cocycle and class of a section or field");
  sub("trivialize", "global gauge for a section with zero class");
  bool with_pairs = false;
  sub("factor", "global factorization or obstruction")->add_flag("--pairs", with_pairs, "include factor pairs");
  std::string cover = "stars";
  bool uniform = false;
  auto* syn = sub("synthesize", "operator field from a section");
  syn->add_option("--cover", cover, "stars or whole")->check(CLI::IsMember({"stars", "whole"}));
  syn->add_flag("--uniform", uniform, "uniform patch weights");
  std::size_t stages = 6;
  bool absolute = false;
  for (const char* name : {"approximate", "verdict"}) {
    auto* c = sub(name, std::string(name) == "verdict" ? "closure verdict" : "stagewise multiplication approximants");
    c->add_option("--stages", stages, "number of thresholds");
    c->add_flag("--absolute", absolute, "delta_n = 2^-n instead of 2^-n sup");
  }
  std::size_t amp = 4;
  sub("haagerup", "norm estimates of an elementary operator")->add_option("--levels", amp, "amplification levels");
  double eps = 0.0;
  sub("recover", "phase recovery certificate for nearby pairs")->add_option("--eps", eps, "distance bound");
  sub("cohomology", "integral cohomology of a complex");
  std::size_t trials = 20, q_len = 1, q_n = 2;
  auto* q = sub("question33-experiment", "non-normative closedness search");
  q->add_option("--trials", trials);
  q->add_option("--length", q_len);
  q->add_option("--n", q_n);

  TowerArgs ta;
  CLI::App* tel = app.add_subcommand("telescope", "mapping telescope tools");
  tel->require_subcommand(1);
  tel->add_option("--tower", ta.tower_file, "tower JSON");
  tel->add_option("--degrees", ta.degrees, "comma-separated explicit degrees");
  tel->add_option("--tail", ta.tail, "canonical or constant:<d>");
  tel->add_option("--gluing", ta.gluing_file, "gluing JSON");
  tel->add_option("--k", ta.k, "comma-separated finite support");
  tel->add_option("--tail-c", ta.tail_c, "constant tail of k");
  tel->add_option("--levels", ta.levels, "truncation levels");
  tel->fallthrough();
  CLI::App* t_build = tel->add_subcommand("build", "truncation mesh and its cohomology");
  CLI::App* t_decide = tel->add_subcommand("decide", "trivial or phantom, with certificate");
  CLI::App* t_demo = tel->add_subcommand("demo", "operator realization on truncations");
  for (auto* c : {t_build, t_decide, t_demo}) c->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  std::string which;
  try {
    check_ranges(s);
    if (tel->parsed()) {
      which = "telescope";
      if (t_build->parsed()) return cmd_telescope_build(s, ta);
      if (t_decide->parsed()) return cmd_telescope_decide(s, ta);
      return cmd_telescope_demo(s, ta);
    }
    for (const auto& [name, c] : cmds)
      if (c->parsed()) which = name;
    if (which == "analyze") return cmd_analyze(s);
    if (which == "extract") return cmd_extract(s);
    if (which == "chern") return cmd_chern(s);
    if (which == "trivialize") return cmd_trivialize(s);
    if (which == "factor") return cmd_factor(s, with_pairs);
    if (which == "synthesize") return cmd_synthesize(s, cover, uniform);
    if (which == "approximate") return cmd_approximate(s, stages, absolute);
    if (which == "verdict") return cmd_verdict(s, stages, absolute);
    if (which == "haagerup") return cmd_haagerup(s, amp);
    if (which == "recover") return cmd_recover(s, eps);
    if (which == "cohomology") return cmd_cohomology(s);
    if (which == "question33-experiment") return cmd_question33(s, trials, q_len, q_n);
    return kInput;
  } catch (const ts::Error& e) {
    Json j = header(which, s);
    j["error"] = {{"kind", ts::to_string(e.kind())}, {"message", e.what()}, {"where", e.where()}};
    try {
      emit(s, j);
    } catch (const ts::Error&) {
      std::cout << j.dump(2) << "\n";
    }
    std::cerr << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const Json::exception& e) {
    std::cerr << "invalid JSON input: " << e.what() << "\n";
    return kInput;
  }
}

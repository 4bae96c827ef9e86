// SPDX-License-Identifier: Apache-2.0
//
// Norm estimators for elementary operators on M_n.
//
//   amplification_norm  lower estimate of ||phi^(l)|| by alternating maximization
//   haagerup_upper      min over representations of ||A_row|| ||B_col|| (simplex search)
//   haagerup_norm       both bounds; exact for length <= 1
#pragma once

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "twosided/fibre.hpp"
#include "twosided/random.hpp"

namespace twosided {

struct NormOptions {
  int iters = 200;        // alternating sweeps per start
  int starts = 6;         // random starts per amplification level
  std::uint64_t seed = 0;
  int simplex_evals = 6000;
  double tol = 1e-13;
};

namespace detail {

// (I_l (x) a) X (I_l (x) b), X of size (l n) x (l n)
inline CMat amplified_apply(const ElementaryRep& rep, std::size_t l, const CMat& x) {
  const std::size_t n = rep.n;
  CMat y = CMat::Zero(l * n, l * n);
  for (const auto& p : rep.pairs)
    for (std::size_t r = 0; r < l; ++r)
      for (std::size_t c = 0; c < l; ++c)
        y.block(r * n, c * n, n, n) += p.a * x.block(r * n, c * n, n, n) * p.b;
  return y;
}

struct AmpState {
  CVec xi;   // input-side unit vector
  CVec eta;  // output-side unit vector
  CMat x;    // contraction
  double value = -1.0;
};

// One alternating ascent from (xi, eta).
inline AmpState ascend(const ElementaryRep& rep, std::size_t l, CVec xi, CVec eta, const NormOptions& opt) {
  const std::size_t n = rep.n;
  const std::size_t m = rep.pairs.size();
  const std::size_t dim = l * n;
  AmpState best;
  best.x = CMat::Zero(dim, dim);
  double prev = -1.0;
  for (int it = 0; it < opt.iters; ++it) {
    // value(X) = eta^* phi(X) xi = tr(X G), G = sum_i (B_i xi)(A_i^* eta)^*
    CMat p(dim, m), q(dim, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t r = 0; r < l; ++r) {
        p.block(r * n, i, n, 1) = rep.pairs[i].b * xi.segment(r * n, n);
        q.block(r * n, i, n, 1) = rep.pairs[i].a.adjoint() * eta.segment(r * n, n);
      }
    const CMat g = p * q.adjoint();
    Eigen::JacobiSVD<CMat> sg(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const CMat x = sg.matrixV() * sg.matrixU().adjoint();
    const CMat y = amplified_apply(rep, l, x);
    Eigen::JacobiSVD<CMat> sy(y, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double v = sy.singularValues()(0);
    if (v > best.value) {
      best.value = v;
      best.x = x;
      best.xi = sy.matrixV().col(0);
      best.eta = sy.matrixU().col(0);
    }
    eta = sy.matrixU().col(0);
    xi = sy.matrixV().col(0);
    if (prev >= 0.0 && v - prev <= opt.tol * std::max(v, 1.0)) break;
    prev = v;
  }
  return best;
}

}  // namespace detail

/// Estimates of ||phi^(k)|| for k = 1..l. Each level is seeded with the padded
/// optimum of the previous one, so the profile is nondecreasing.
inline std::vector<double> amplification_profile(const ElementaryRep& rep, std::size_t l,
                                                 const NormOptions& opt = {}) {
  if (l == 0) fail(ErrorKind::InvalidInput, "amplification level must be positive");
  std::vector<double> out;
  const std::size_t n = rep.n;
  if (rep.pairs.empty()) return std::vector<double>(l, 0.0);
  Rng rng(opt.seed);
  detail::AmpState carry;
  for (std::size_t level = 1; level <= l; ++level) {
    const std::size_t dim = level * n;
    detail::AmpState best;
    if (carry.value >= 0.0) {
      CVec xi = CVec::Zero(dim), eta = CVec::Zero(dim);
      xi.head(dim - n) = carry.xi;
      eta.head(dim - n) = carry.eta;
      best = detail::ascend(rep, level, xi, eta, opt);
      if (best.value < carry.value) best = carry;  // padding preserves the value exactly
    }
    for (int s = 0; s < opt.starts; ++s) {
      CVec xi = random_unit_vector(dim, rng);
      CVec eta = random_unit_vector(dim, rng);
      detail::AmpState st = detail::ascend(rep, level, xi, eta, opt);
      if (st.value > best.value) best = st;
    }
    if (static_cast<std::size_t>(best.xi.size()) != dim) {
      // carried state from the previous level: pad to the current size
      CVec xi = CVec::Zero(dim), eta = CVec::Zero(dim);
      xi.head(best.xi.size()) = best.xi;
      eta.head(best.eta.size()) = best.eta;
      best.xi = xi;
      best.eta = eta;
    }
    out.push_back(std::max(best.value, out.empty() ? 0.0 : out.back()));
    carry = best;
  }
  return out;
}

inline double amplification_norm(const ElementaryRep& rep, std::size_t l, const NormOptions& opt = {}) {
  return amplification_profile(rep, l, opt).back();
}

/// Operator norm of a fibre operator on (M_n, ||.||_op). Exact for length <= 1.
inline double fibre_norm(const FibreOperator& f, const NormOptions& opt = {}) {
  const ElementaryRep rep = minimal_rep(f);
  if (rep.pairs.empty()) return 0.0;
  if (rep.pairs.size() == 1) return op_norm(rep.pairs[0].a) * op_norm(rep.pairs[0].b);
  return amplification_norm(rep, 1, opt);
}

// --- Representation minimization --------------------------------------------

namespace detail {

inline CMat row_stack(const std::vector<CMat>& as) {
  const Eigen::Index n = as.front().rows();
  CMat r(n, n * static_cast<Eigen::Index>(as.size()));
  for (std::size_t i = 0; i < as.size(); ++i) r.block(0, static_cast<Eigen::Index>(i) * n, n, n) = as[i];
  return r;
}

inline CMat col_stack(const std::vector<CMat>& bs) {
  const Eigen::Index n = bs.front().rows();
  CMat c(n * static_cast<Eigen::Index>(bs.size()), n);
  for (std::size_t i = 0; i < bs.size(); ++i) c.block(static_cast<Eigen::Index>(i) * n, 0, n, n) = bs[i];
  return c;
}

inline double top_eigenvalue(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

// ||sum a_i a_i^*||^{1/2} ||sum b_i^* b_i||^{1/2}
inline double rep_value(const std::vector<CMat>& as, const std::vector<CMat>& bs) {
  const CMat r = row_stack(as), c = col_stack(bs);
  return std::sqrt(top_eigenvalue(r * r.adjoint()) * top_eigenvalue(c.adjoint() * c));
}

// Lower-triangular S with S(0,0) = 1, positive diagonal exp(.), complex strict
// lower part. Any invertible S reduces to this form modulo a right unitary and
// a scalar, neither of which changes the representation value.
inline CMat unpack_lower(const double* x, std::size_t l) {
  CMat s = CMat::Zero(l, l);
  std::size_t k = 0;
  s(0, 0) = 1.0;
  for (std::size_t i = 1; i < l; ++i) s(i, i) = std::exp(x[k++]);
  for (std::size_t i = 1; i < l; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      s(i, j) = Complex(x[k], x[k + 1]);
      k += 2;
    }
  return s;
}

struct RepProblem {
  std::vector<CMat> as, bs;
  double evaluate(const double* x) const {
    const std::size_t l = as.size();
    const CMat s = unpack_lower(x, l);
    const CMat sinv = s.triangularView<Eigen::Lower>().solve(CMat::Identity(l, l));
    std::vector<CMat> a2(l, CMat::Zero(as[0].rows(), as[0].cols()));
    std::vector<CMat> b2(l, CMat::Zero(bs[0].rows(), bs[0].cols()));
    for (std::size_t j = 0; j < l; ++j)
      for (std::size_t i = 0; i < l; ++i) {
        if (s(i, j) != Complex(0.0)) a2[j] += as[i] * s(i, j);
        if (sinv(j, i) != Complex(0.0)) b2[j] += sinv(j, i) * bs[i];
      }
    const double v = rep_value(a2, b2);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
  }
};

inline double gsl_rep_objective(const gsl_vector* v, void* params) {
  const auto* prob = static_cast<const RepProblem*>(params);
  return prob->evaluate(v->data);
}

}  // namespace detail

/// Upper bound for the Haagerup norm of sum a_i (x) b_i: the best representation
/// value over the original representation, the SVD-minimal one, and a simplex
/// search over re-parameterizations of the minimal one.
inline double haagerup_upper(const ElementaryRep& rep, const NormOptions& opt = {}) {
  if (rep.pairs.empty()) return 0.0;
  std::vector<CMat> as, bs;
  for (const auto& p : rep.pairs) {
    as.push_back(p.a);
    bs.push_back(p.b);
  }
  double best = detail::rep_value(as, bs);
  const ElementaryRep minimal = minimal_rep(to_fibre_matrix(rep));
  const std::size_t l = minimal.pairs.size();
  if (l == 0) return 0.0;
  detail::RepProblem prob;
  for (const auto& p : minimal.pairs) {
    prob.as.push_back(p.a);
    prob.bs.push_back(p.b);
  }
  best = std::min(best, detail::rep_value(prob.as, prob.bs));
  if (l == 1) return best;

  const std::size_t dim = l * l - 1;
  gsl_set_error_handler_off();
  gsl_multimin_function fn{&detail::gsl_rep_objective, dim, &prob};
  gsl_vector* x = gsl_vector_calloc(dim);
  gsl_vector* step = gsl_vector_alloc(dim);
  gsl_vector_set_all(step, 0.3);
  gsl_multimin_fminimizer* m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);
  // two restarts from the incumbent shake the simplex out of early collapse
  for (int round = 0; round < 3; ++round) {
    gsl_multimin_fminimizer_set(m, &fn, x, step);
    for (int it = 0; it < opt.simplex_evals / 3; ++it) {
      if (gsl_multimin_fminimizer_iterate(m) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), 1e-10) == GSL_SUCCESS) break;
    }
    gsl_vector_memcpy(x, gsl_multimin_fminimizer_x(m));
    best = std::min(best, m->fval);
    gsl_vector_set_all(step, 0.1);
  }
  gsl_multimin_fminimizer_free(m);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return best;
}

struct HaagerupEstimate {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t length = 0;
  double gap() const { return upper - lower; }
  double value() const { return lower; }
};

/// Haagerup norm of sum a_i (x) b_i, which on M_n equals the cb-norm of the
/// elementary operator and is attained at amplification level = length.
inline HaagerupEstimate haagerup_norm(const ElementaryRep& rep, const NormOptions& opt = {}) {
  HaagerupEstimate h;
  const ElementaryRep minimal = minimal_rep(to_fibre_matrix(rep));
  h.length = minimal.pairs.size();
  if (h.length == 0) return h;
  if (h.length == 1) {
    h.lower = h.upper = op_norm(minimal.pairs[0].a) * op_norm(minimal.pairs[0].b);
    return h;
  }
  h.lower = amplification_norm(minimal, h.length, opt);
  h.upper = haagerup_upper(rep, opt);
  return h;
}

/// Certified upper bound on the Haagerup distance between a (x) b and c (x) d.
inline double haagerup_distance_upper(const CMat& a, const CMat& b, const CMat& c, const CMat& d,
                                      const NormOptions& opt = {}) {
  // triangle bound through a (x) d
  const double tri = std::min(op_norm(a - c) * op_norm(d) + op_norm(a) * op_norm(b - d),
                              op_norm(a - c) * op_norm(b) + op_norm(c) * op_norm(b - d));
  const ElementaryRep diff(static_cast<std::size_t>(a.rows()), {Pair{a, b}, Pair{-c, d}});
  return std::min(tri, haagerup_upper(diff, opt));
}

}  // namespace twosided

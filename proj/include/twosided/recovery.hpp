// SPDX-License-Identifier: Apache-2.0
//
// Phase recovery for nearby rank-one tensors: if a (x) b and c (x) d are within
// eps <= 1/3 in the Haagerup norm (all factors of norm one), a unit scalar mu
// brings (c, d) within 6 eps of (a, b) factorwise.
#pragma once

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "twosided/fibre.hpp"
#include "twosided/norms.hpp"

namespace twosided {

inline constexpr double kRecoveryConstant = 6.0;
inline constexpr double kRecoveryThreshold = 1.0 / 3.0;

struct RecoveryCertificate {
  Complex mu{1.0, 0.0};
  double bound_a = 0.0;  // ||a - mu c||
  double bound_b = 0.0;  // ||b - conj(mu) d||
  double epsilon = 0.0;
  double ratio() const { return epsilon > 0.0 ? std::max(bound_a, bound_b) / epsilon : 0.0; }
};

struct RecoveryOptions {
  bool verify_distance = true;  // estimate the Haagerup distance to check eps
  double norm_tol = 1e-9;
  NormOptions norm{.starts = 2};
};

/// max(||a - e^{i t} c||, ||b - e^{-i t} d||) minimized over t.
inline Complex best_phase(const CMat& a, const CMat& b, const CMat& c, const CMat& d) {
  const auto objective = [&](double t) {
    const Complex mu = std::polar(1.0, t);
    return std::max(op_norm(a - mu * c), op_norm(b - std::conj(mu) * d));
  };
  const Complex ip = hs_inner(a, c);
  const double t0 = std::abs(ip) > 0.0 ? std::arg(ip) : 0.0;
  double best_t = t0;
  double best_v = objective(t0);
  constexpr int kGrid = 72;
  const double h = 2.0 * std::numbers::pi / kGrid;
  for (int i = 1; i < kGrid; ++i) {
    const double t = t0 + i * h;
    const double v = objective(t);
    if (v < best_v) {
      best_v = v;
      best_t = t;
    }
  }
  std::uintmax_t iters = 200;
  const auto [t, v] = boost::math::tools::brent_find_minima(objective, best_t - h, best_t + h, 50, iters);
  if (v < best_v) best_t = t;
  return std::polar(1.0, best_t);
}

inline RecoveryCertificate recover_pair(const CMat& a, const CMat& b, const CMat& c, const CMat& d,
                                        double eps, const RecoveryOptions& opt = {}) {
  require_square(a, "a");
  require_same_dim(a, b);
  require_same_dim(a, c);
  require_same_dim(a, d);
  if (!(eps > 0.0) || eps > kRecoveryThreshold)
    fail(ErrorKind::PreconditionViolated, "eps must lie in (0, 1/3]");
  for (const CMat* m : {&a, &b, &c, &d})
    if (std::abs(op_norm(*m) - 1.0) > opt.norm_tol)
      fail(ErrorKind::PreconditionViolated, "factors must have operator norm one");
  if (opt.verify_distance) {
    const ElementaryRep diff(static_cast<std::size_t>(a.rows()), {Pair{a, b}, Pair{-c, d}});
    const ElementaryRep minimal = minimal_rep(to_fibre_matrix(diff));
    // any lower estimate is a sound guard; it may touch a measured eps to rounding
    const double lower = minimal.pairs.empty() ? 0.0 : amplification_norm(minimal, minimal.pairs.size(), opt.norm);
    if (lower > eps * (1.0 + 1e-9))
      fail(ErrorKind::PreconditionViolated, "Haagerup distance " + std::to_string(lower) + " is not below eps");
  }
  RecoveryCertificate cert;
  cert.mu = best_phase(a, b, c, d);
  cert.bound_a = op_norm(a - cert.mu * c);
  cert.bound_b = op_norm(b - std::conj(cert.mu) * d);
  cert.epsilon = eps;
  if (std::max(cert.bound_a, cert.bound_b) >= kRecoveryConstant * eps)
    fail(ErrorKind::BoundViolated, "recovered phase misses the 6 eps bound");
  return cert;
}

struct StabilizedSequence {
  CMat a;
  CMat b;
  std::vector<Pair> corrected;
  std::vector<double> distances;  // upper bounds on consecutive Haagerup distances
  std::vector<RecoveryCertificate> certificates;
  double tail_bound = 0.0;        // bound on ||a'_K - lim||
};

/// Phase-corrects a sequence of unit-balanced pairs so the corrected factor
/// sequences are Cauchy. Requires d_k <= 1 / (6 2^k) for k >= first_index,
/// where k counts from 1 at the first pair.
inline StabilizedSequence stabilize_sequence(const std::vector<Pair>& seq, std::size_t first_index = 1,
                                             const NormOptions& opt = {}) {
  if (seq.empty()) fail(ErrorKind::InvalidInput, "empty sequence");
  StabilizedSequence out;
  out.corrected.push_back(seq.front());
  RecoveryOptions ropt;
  ropt.verify_distance = false;  // the certified upper bound below already checks it
  ropt.norm = opt;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    const std::size_t k = i;  // distance between terms k and k + 1
    const Pair& prev = out.corrected.back();
    const Pair& next = seq[i];
    const double dist = haagerup_distance_upper(prev.a, prev.b, next.a, next.b, opt);
    out.distances.push_back(dist);
    const double allowed = 1.0 / (6.0 * std::ldexp(1.0, static_cast<int>(k)));
    if (k >= first_index && dist > allowed)
      fail(ErrorKind::NotCauchy, "consecutive distance exceeds 1/(6 2^k)", {k});
    const double eps = std::min(kRecoveryThreshold, std::max(dist * (1.0 + 1e-12), 1e-300));
    RecoveryCertificate cert;
    if (dist == 0.0) {
      cert.mu = 1.0;
      cert.epsilon = eps;
    } else if (dist >= kRecoveryThreshold) {
      // early terms before first_index: align without a certificate
      cert.mu = best_phase(prev.a, prev.b, next.a, next.b);
      cert.bound_a = op_norm(prev.a - cert.mu * next.a);
      cert.bound_b = op_norm(prev.b - std::conj(cert.mu) * next.b);
      cert.epsilon = dist;
    } else {
      cert = recover_pair(prev.a, prev.b, next.a, next.b, eps, ropt);
    }
    out.certificates.push_back(cert);
    out.corrected.push_back(Pair{cert.mu * next.a, std::conj(cert.mu) * next.b});
  }
  out.a = out.corrected.back().a;
  out.b = out.corrected.back().b;
  const std::size_t last = seq.size();
  out.tail_bound = std::ldexp(1.0, 1 - static_cast<int>(last));
  return out;
}

}  // namespace twosided

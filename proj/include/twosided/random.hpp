// SPDX-License-Identifier: Apache-2.0
//
// Seeded sampling helpers. Everything randomized in the library takes an
// explicit engine or seed so reports are reproducible.
#pragma once

#include <cstdint>
#include <numbers>
#include <random>

#include "twosided/fibre.hpp"

namespace twosided {

using Rng = std::mt19937_64;

inline Complex gaussian_complex(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

inline CMat random_cmat(std::size_t rows, std::size_t cols, Rng& rng) {
  CMat m(rows, cols);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = gaussian_complex(rng);
  return m;
}

inline CMat random_cmat(std::size_t n, Rng& rng) { return random_cmat(n, n, rng); }

inline CVec random_unit_vector(std::size_t n, Rng& rng) {
  CVec v = random_cmat(n, 1, rng).col(0);
  return v / v.norm();
}

/// Operator-norm one.
inline CMat random_unit_cmat(std::size_t n, Rng& rng) {
  CMat m = random_cmat(n, rng);
  return m / op_norm(m);
}

/// Haar-ish unitary from the QR factorization of a Gaussian matrix.
inline CMat random_unitary(std::size_t n, Rng& rng) {
  Eigen::HouseholderQR<CMat> qr(random_cmat(n, rng));
  CMat q = qr.householderQ();
  const CMat r = qr.matrixQR();
  for (std::size_t j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

inline Complex random_phase(Rng& rng) {
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  return std::polar(1.0, u(rng));
}

inline ElementaryRep random_rep(std::size_t n, std::size_t terms, Rng& rng) {
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < terms; ++i) pairs.push_back(Pair{random_cmat(n, rng), random_cmat(n, rng)});
  return ElementaryRep(n, std::move(pairs));
}

}  // namespace twosided

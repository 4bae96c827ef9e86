// SPDX-License-Identifier: Apache-2.0
//
// Complex matrix primitives and elementary operators x -> sum_i a_i x b_i on
// the n x n matrices. A linear map on M_n is stored as its n^2 x n^2 matrix in
// the matrix-unit basis e_{ij}, ordered lexicographically by (i, j); vec()
// below uses the same row-major order.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "twosided/error.hpp"

namespace twosided {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double kDefaultRankTol = 1e-9;

inline CMat matrix_unit(std::size_t n, std::size_t i, std::size_t j) {
  CMat e = CMat::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

inline CMat identity(std::size_t n) { return CMat::Identity(n, n); }

inline bool all_finite(const CMat& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

inline void require_square(const CMat& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    fail(ErrorKind::DimensionMismatch, std::string(what) + " must be a non-empty square matrix");
}

inline void require_same_dim(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorKind::DimensionMismatch, "matrix dimensions differ");
}

inline Eigen::VectorXd singular_values(const CMat& m) {
  if (m.size() == 0) return Eigen::VectorXd();
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues();
}

/// C*-norm of a fibre element: the largest singular value.
inline double op_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

/// Hilbert-Schmidt inner product tr(a b^*).
inline Complex hs_inner(const CMat& a, const CMat& b) {
  require_same_dim(a, b);
  Complex s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += a.data()[i] * std::conj(b.data()[i]);
  return s;
}

inline double hs_norm(const CMat& a) { return a.norm(); }

/// Row-major vectorization: vec(a)[i*n + j] = a(i, j).
inline CVec vec(const CMat& a) {
  CVec v(a.size());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) v(i * a.cols() + j) = a(i, j);
  return v;
}

inline CMat unvec(const CVec& v, std::size_t n) {
  if (static_cast<std::size_t>(v.size()) != n * n)
    fail(ErrorKind::DimensionMismatch, "vector length is not n^2");
  CMat a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = v(i * n + j);
  return a;
}

// --- Elementary operators ---------------------------------------------------

struct Pair {
  CMat a;
  CMat b;
};

/// sum_i M_{a_i, b_i}; doubles as the tensor sum_i a_i (x) b_i. An empty list is
/// the zero operator.
struct ElementaryRep {
  std::size_t n = 1;
  std::vector<Pair> pairs;

  ElementaryRep() = default;
  ElementaryRep(std::size_t dim, std::vector<Pair> ps) : n(dim), pairs(std::move(ps)) {
    if (n == 0) fail(ErrorKind::DimensionMismatch, "dimension must be positive");
    for (const auto& p : pairs) {
      if (static_cast<std::size_t>(p.a.rows()) != n || static_cast<std::size_t>(p.a.cols()) != n ||
          static_cast<std::size_t>(p.b.rows()) != n || static_cast<std::size_t>(p.b.cols()) != n)
        fail(ErrorKind::DimensionMismatch, "coefficient has wrong dimension");
      if (!all_finite(p.a) || !all_finite(p.b))
        fail(ErrorKind::InvalidInput, "coefficient has non-finite entries");
    }
  }

  static ElementaryRep single(const CMat& a, const CMat& b) {
    require_square(a, "a");
    return ElementaryRep(static_cast<std::size_t>(a.rows()), {Pair{a, b}});
  }

  ElementaryRep scaled(Complex c) const {
    ElementaryRep r = *this;
    for (auto& p : r.pairs) p.a *= c;
    return r;
  }

  ElementaryRep operator-(const ElementaryRep& other) const {
    if (other.n != n) fail(ErrorKind::DimensionMismatch, "rep dimensions differ");
    ElementaryRep r = *this;
    for (const auto& p : other.pairs) r.pairs.push_back(Pair{-p.a, p.b});
    return r;
  }
};

inline CMat apply(const ElementaryRep& rep, const CMat& x) {
  if (static_cast<std::size_t>(x.rows()) != rep.n || static_cast<std::size_t>(x.cols()) != rep.n)
    fail(ErrorKind::DimensionMismatch, "argument dimension differs from operator dimension");
  CMat y = CMat::Zero(rep.n, rep.n);
  for (const auto& p : rep.pairs) y += p.a * x * p.b;
  return y;
}

/// A linear map on M_n as an n^2 x n^2 matrix; column (i,j) holds vec(phi(e_ij)).
struct FibreOperator {
  std::size_t n = 1;
  CMat matrix;

  FibreOperator() : matrix(CMat::Zero(1, 1)) {}
  FibreOperator(std::size_t dim, CMat m) : n(dim), matrix(std::move(m)) {
    if (n == 0 || static_cast<std::size_t>(matrix.rows()) != n * n ||
        static_cast<std::size_t>(matrix.cols()) != n * n)
      fail(ErrorKind::DimensionMismatch, "fibre operator must be n^2 x n^2");
    if (!all_finite(matrix)) fail(ErrorKind::InvalidInput, "fibre operator has non-finite entries");
  }

  static FibreOperator zero(std::size_t dim) { return {dim, CMat::Zero(dim * dim, dim * dim)}; }

  CMat operator()(const CMat& x) const {
    if (static_cast<std::size_t>(x.rows()) != n || static_cast<std::size_t>(x.cols()) != n)
      fail(ErrorKind::DimensionMismatch, "argument dimension differs from operator dimension");
    return unvec(matrix * vec(x), n);
  }

  FibreOperator operator-(const FibreOperator& o) const {
    if (o.n != n) fail(ErrorKind::DimensionMismatch, "operator dimensions differ");
    return {n, matrix - o.matrix};
  }
  FibreOperator operator+(const FibreOperator& o) const {
    if (o.n != n) fail(ErrorKind::DimensionMismatch, "operator dimensions differ");
    return {n, matrix + o.matrix};
  }
  FibreOperator operator*(double s) const { return {n, matrix * s}; }
};

inline FibreOperator to_fibre_matrix(const ElementaryRep& rep) {
  const std::size_t n = rep.n;
  CMat m = CMat::Zero(n * n, n * n);
  // phi(e_ij)(k, l) = sum_p a_p(k, i) b_p(j, l)
  for (const auto& p : rep.pairs)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          const Complex aki = p.a(k, i);
          if (aki == Complex(0.0)) continue;
          for (std::size_t l = 0; l < n; ++l) m(k * n + l, i * n + j) += aki * p.b(j, l);
        }
  return {n, m};
}

/// Realignment R[(i,k),(j,l)] = F[(i,j),(k,l)]; R(M_{a,b}) = vec(a) vec(b^T)^T.
/// The map is an involution on n^2 x n^2 matrices.
inline CMat realign(const CMat& f, std::size_t n) {
  CMat r(n * n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) r(i * n + k, j * n + l) = f(i * n + j, k * n + l);
  return r;
}

inline CMat reshuffle(const FibreOperator& f) { return realign(f.matrix, f.n); }

/// Singular values of the realigned matrix, i.e. of the tensor sum a_i (x) b_i
/// under the Hilbert-Schmidt structure.
inline Eigen::VectorXd tensor_singular_values(const FibreOperator& f) {
  return singular_values(reshuffle(f));
}

/// Numerical tensor rank: count of realigned singular values >= tol * sigma_max.
inline std::size_t length(const FibreOperator& f, double tol = kDefaultRankTol) {
  const Eigen::VectorXd s = tensor_singular_values(f);
  if (s.size() == 0 || !(s(0) > 0.0)) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) >= tol * s(0)) ++r;
  return r;
}

namespace detail {

// Rotate so the first entry of maximal modulus is real and positive.
inline Complex canonical_phase(const CMat& a) {
  Eigen::Index best = 0;
  double mag = -1.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double m = std::abs(a.data()[i]);
    if (m > mag * (1.0 + 1e-12)) {
      mag = m;
      best = i;
    }
  }
  if (mag <= 0.0) return 1.0;
  return std::conj(a.data()[best]) / mag;
}

}  // namespace detail

/// Minimal-length representation read off the realigned SVD.
inline ElementaryRep minimal_rep(const FibreOperator& f, double tol = kDefaultRankTol) {
  const std::size_t n = f.n;
  Eigen::JacobiSVD<CMat> svd(reshuffle(f), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  std::vector<Pair> pairs;
  if (s.size() == 0 || !(s(0) > 0.0)) return ElementaryRep(n, {});
  for (Eigen::Index r = 0; r < s.size(); ++r) {
    if (s(r) < tol * s(0)) break;
    const double root = std::sqrt(s(r));
    CMat a = unvec(svd.matrixU().col(r) * root, n);
    CMat bt = unvec(svd.matrixV().col(r).conjugate() * root, n);
    pairs.push_back(Pair{std::move(a), bt.transpose()});
  }
  return ElementaryRep(n, std::move(pairs));
}

struct RankOneFactor {
  CMat a;
  CMat b;
  double residual = 0.0;  // Frobenius norm of F - matrix(M_{a,b})
};

/// Balance a two-sided multiplication so that ||a|| = ||b||.
inline void balance(CMat& a, CMat& b) {
  const double na = op_norm(a);
  const double nb = op_norm(b);
  if (na > 0.0 && nb > 0.0) {
    a *= std::sqrt(nb / na);
    b *= std::sqrt(na / nb);
  }
}

/// Factor a length-1 fibre operator as M_{a,b} with ||a|| = ||b|| = sqrt(||f||).
/// The zero operator yields (0, 0, 0) only when `allow_zero` is set.
inline RankOneFactor rank_one_factor(const FibreOperator& f, double tol = kDefaultRankTol,
                                     bool allow_zero = false) {
  const std::size_t n = f.n;
  Eigen::JacobiSVD<CMat> svd(reshuffle(f), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  if (!(s(0) > 0.0)) {
    if (!allow_zero) fail(ErrorKind::ZeroOperator, "zero operator has no balanced factorization");
    return {CMat::Zero(n, n), CMat::Zero(n, n), 0.0};
  }
  if (s.size() > 1 && s(1) >= tol * s(0))
    fail(ErrorKind::LengthExceeded,
         "second tensor singular value " + std::to_string(s(1)) + " exceeds tolerance");
  const double root = std::sqrt(s(0));
  CMat a = unvec(svd.matrixU().col(0) * root, n);
  CMat b = unvec(svd.matrixV().col(0).conjugate() * root, n).transpose();
  balance(a, b);
  const Complex ph = detail::canonical_phase(a);
  a *= ph;
  b /= ph;
  const double residual = (f.matrix - to_fibre_matrix(ElementaryRep(n, {Pair{a, b}})).matrix).norm();
  return {std::move(a), std::move(b), residual};
}

// --- Special two-sided multiplications ---------------------------------------

struct SpecialClass {
  bool tm = false;           // M_{a,b}
  bool tm_cp = false;        // M_{a,a*}
  bool inn_aut_alg = false;  // M_{a,a^-1}
  bool inn_aut = false;      // M_{u,u*}, u unitary

  std::vector<std::string> tags() const {
    std::vector<std::string> t;
    if (tm) t.emplace_back("TM");
    if (tm_cp) t.emplace_back("TM_cp");
    if (inn_aut_alg) t.emplace_back("InnAut_alg");
    if (inn_aut) t.emplace_back("InnAut");
    return t;
  }
};

/// Membership tests are phase-free: with a balanced factorization M_{a,b},
/// M_{a,b} = M_{c,c*} iff b = a*, and M_{a,b} = M_{c,c^-1} iff ab = 1.
inline SpecialClass classify_special(const FibreOperator& f, double tol = 1e-8) {
  SpecialClass out;
  RankOneFactor fac;
  try {
    fac = rank_one_factor(f, tol);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::LengthExceeded || e.kind() == ErrorKind::ZeroOperator) return out;
    throw;
  }
  out.tm = true;
  const double scale = std::max(op_norm(fac.a), 1e-300);
  out.tm_cp = op_norm(fac.b - fac.a.adjoint()) <= tol * scale * 10.0;
  const Eigen::VectorXd sv = singular_values(fac.a);
  const bool invertible = sv(sv.size() - 1) > tol * sv(0);
  const CMat one = identity(f.n);
  out.inn_aut_alg = invertible && op_norm(fac.a * fac.b - one) <= tol * 10.0;
  out.inn_aut = out.tm_cp && out.inn_aut_alg;
  return out;
}

/// Choi matrix C[(i,k),(j,l)] = phi(e_ij)(k,l).
inline CMat choi_matrix(const FibreOperator& f) {
  const std::size_t n = f.n;
  CMat c(n * n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) c(i * n + k, j * n + l) = f.matrix(k * n + l, i * n + j);
  return c;
}

/// Complete positivity via the Choi matrix: Hermitian and positive semidefinite
/// up to `tol` relative to its largest eigenvalue.
inline bool is_completely_positive(const FibreOperator& f, double tol = 1e-10) {
  const CMat c = choi_matrix(f);
  const double scale = std::max(c.norm(), 1e-300);
  if ((c - c.adjoint()).norm() > tol * scale) return false;
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (c + c.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol * scale;
}

}  // namespace twosided

// SPDX-License-Identifier: Apache-2.0
//
// Exact integer linear algebra: Smith normal form with transforms, and a
// sparse reduction (unit-pivot elimination followed by Smith on the small
// remainder) that solves A x = b over Z and reads off cokernel coordinates.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "twosided/error.hpp"

namespace twosided {

using BigInt = boost::multiprecision::cpp_int;

struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<BigInt> data;  // row-major

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
  IntMatrix(std::initializer_list<std::initializer_list<long long>> init) {
    rows = init.size();
    cols = rows ? init.begin()->size() : 0;
    for (const auto& row : init) {
      if (row.size() != cols) fail(ErrorKind::DimensionMismatch, "ragged integer matrix");
      for (long long x : row) data.emplace_back(x);
    }
  }

  static IntMatrix identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  BigInt& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const BigInt& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  bool operator==(const IntMatrix& o) const { return rows == o.rows && cols == o.cols && data == o.data; }

  IntMatrix operator*(const IntMatrix& o) const {
    if (cols != o.rows) fail(ErrorKind::DimensionMismatch, "integer matrix product shape");
    IntMatrix r(rows, o.cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t k = 0; k < cols; ++k) {
        const BigInt& a = (*this)(i, k);
        if (a == 0) continue;
        for (std::size_t j = 0; j < o.cols; ++j) r(i, j) += a * o(k, j);
      }
    return r;
  }
};

/// Fraction-free (Bareiss) determinant.
inline BigInt determinant(IntMatrix m) {
  if (m.rows != m.cols) fail(ErrorKind::DimensionMismatch, "determinant of non-square matrix");
  const std::size_t n = m.rows;
  if (n == 0) return 1;
  BigInt sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

struct SmithResult {
  IntMatrix U, D, V;                   // U A V = D
  std::vector<BigInt> invariant_factors;  // nonzero diagonal, d_i | d_{i+1}
  std::size_t rank = 0;
};

namespace detail {

inline void row_axpy(IntMatrix& m, std::size_t dst, std::size_t src, const BigInt& f) {
  if (f == 0) return;
  for (std::size_t j = 0; j < m.cols; ++j) m(dst, j) -= f * m(src, j);
}
inline void col_axpy(IntMatrix& m, std::size_t dst, std::size_t src, const BigInt& f) {
  if (f == 0) return;
  for (std::size_t i = 0; i < m.rows; ++i) m(i, dst) -= f * m(i, src);
}
inline void swap_rows(IntMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(a, j), m(b, j));
}
inline void swap_cols(IntMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < m.rows; ++i) std::swap(m(i, a), m(i, b));
}

}  // namespace detail

/// Smith normal form with unimodular transforms. With `verify`, U A V = D and
/// |det U| = |det V| = 1 are checked exactly on small blocks and by probe
/// vectors on large ones.
inline SmithResult smith_normal_form(const IntMatrix& a, bool verify = true) {
  using namespace detail;
  SmithResult s;
  s.D = a;
  s.U = IntMatrix::identity(a.rows);
  s.V = IntMatrix::identity(a.cols);
  IntMatrix& d = s.D;
  const std::size_t lim = std::min(a.rows, a.cols);
  std::size_t t = 0;
  for (; t < lim; ++t) {
    for (;;) {
      // smallest nonzero entry of the trailing block becomes the pivot
      std::size_t pr = a.rows, pc = a.cols;
      BigInt best;
      for (std::size_t i = t; i < a.rows; ++i)
        for (std::size_t j = t; j < a.cols; ++j) {
          const BigInt& x = d(i, j);
          if (x == 0) continue;
          BigInt ax = abs(x);
          if (pr == a.rows || ax < best) {
            best = ax;
            pr = i;
            pc = j;
          }
        }
      if (pr == a.rows) goto finished;
      swap_rows(d, t, pr);
      swap_rows(s.U, t, pr);
      swap_cols(d, t, pc);
      swap_cols(s.V, t, pc);
      bool clear = true;
      for (std::size_t i = t + 1; i < a.rows; ++i) {
        if (d(i, t) == 0) continue;
        const BigInt q = d(i, t) / d(t, t);
        row_axpy(d, i, t, q);
        row_axpy(s.U, i, t, q);
        if (d(i, t) != 0) clear = false;
      }
      for (std::size_t j = t + 1; j < a.cols; ++j) {
        if (d(t, j) == 0) continue;
        const BigInt q = d(t, j) / d(t, t);
        col_axpy(d, j, t, q);
        col_axpy(s.V, j, t, q);
        if (d(t, j) != 0) clear = false;
      }
      if (!clear) continue;
      bool divides = true;
      for (std::size_t i = t + 1; i < a.rows && divides; ++i)
        for (std::size_t j = t + 1; j < a.cols; ++j)
          if (d(i, j) % d(t, t) != 0) {
            row_axpy(d, t, i, BigInt(-1));
            row_axpy(s.U, t, i, BigInt(-1));
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (d(t, t) < 0) {
      for (std::size_t j = 0; j < a.cols; ++j) d(t, j) = -d(t, j);
      for (std::size_t j = 0; j < a.rows; ++j) s.U(t, j) = -s.U(t, j);
    }
    s.invariant_factors.push_back(d(t, t));
  }
finished:
  s.rank = s.invariant_factors.size();
  if (verify && std::max(a.rows, a.cols) <= 64) {
    if (!(s.U * a * s.V == s.D)) fail(ErrorKind::BoundViolated, "Smith verification U A V = D failed");
    if (abs(determinant(s.U)) != 1 || abs(determinant(s.V)) != 1)
      fail(ErrorKind::BoundViolated, "Smith transforms are not unimodular");
  } else if (verify) {
    // large blocks: probe U A V x = D x on fixed vectors; unimodularity holds by construction
    for (std::size_t probe = 0; probe < 3; ++probe) {
      std::vector<BigInt> x(a.cols);
      for (std::size_t j = 0; j < a.cols; ++j) x[j] = static_cast<long>((j * 7919 + probe * 104729) % 17) - 8;
      auto mul = [](const IntMatrix& m, const std::vector<BigInt>& v) {
        std::vector<BigInt> out(m.rows);
        for (std::size_t i = 0; i < m.rows; ++i)
          for (std::size_t j = 0; j < m.cols; ++j)
            if (m(i, j) != 0) out[i] += m(i, j) * v[j];
        return out;
      };
      if (mul(s.U, mul(a, mul(s.V, x))) != mul(s.D, x))
        fail(ErrorKind::BoundViolated, "Smith verification U A V = D failed");
    }
  }
  if (verify) {
    for (std::size_t i = 0; i + 1 < s.rank; ++i)
      if (s.invariant_factors[i + 1] % s.invariant_factors[i] != 0)
        fail(ErrorKind::BoundViolated, "Smith divisibility chain broken");
  }
  return s;
}

/// Sparse integer matrix as row lists of (column, value).
struct SparseIntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::vector<std::pair<std::size_t, long long>>> entries;

  SparseIntMatrix() = default;
  SparseIntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r) {}

  void add(std::size_t i, std::size_t j, long long v) { entries[i].emplace_back(j, v); }

  IntMatrix dense() const {
    IntMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (const auto& [j, v] : entries[i]) m(i, j) += v;
    return m;
  }

  template <class T>
  std::vector<T> apply(const std::vector<T>& x) const {
    if (x.size() != cols) fail(ErrorKind::DimensionMismatch, "cochain length differs from matrix columns");
    std::vector<T> y(rows, T(0));
    for (std::size_t i = 0; i < rows; ++i)
      for (const auto& [j, v] : entries[i]) y[i] += T(v) * x[j];
    return y;
  }

  /// this * other (other applied first)
  SparseIntMatrix compose(const SparseIntMatrix& other) const {
    if (cols != other.rows) fail(ErrorKind::DimensionMismatch, "sparse product shape");
    SparseIntMatrix r(rows, other.cols);
    for (std::size_t i = 0; i < rows; ++i) {
      std::map<std::size_t, long long> acc;
      for (const auto& [k, v] : entries[i])
        for (const auto& [j, w] : other.entries[k]) acc[j] += v * w;
      for (const auto& [j, v] : acc)
        if (v != 0) r.add(i, j, v);
    }
    return r;
  }

  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (const auto& row : entries)
      for (const auto& e : row) n += e.second != 0;
    return n;
  }
};

/// A x = b over Z for a fixed sparse A. Unit pivots are eliminated first
/// (fewest-entries-first), the remainder goes through smith_normal_form.
class ReducedSystem {
 public:
  struct Solution {
    bool solvable = false;
    std::vector<BigInt> x;              // witness when solvable
    std::vector<BigInt> torsion_coords;  // residues modulo invariant factors > 1
    std::vector<BigInt> free_coords;     // coordinates in the free part of coker A
  };

  ReducedSystem() = default;

  explicit ReducedSystem(const SparseIntMatrix& a) : rows_(a.rows), cols_(a.cols) {
    std::vector<std::map<std::size_t, BigInt>> row(a.rows);
    std::vector<std::set<std::size_t>> colrows(a.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
      for (const auto& [j, v] : a.entries[i]) {
        if (j >= a.cols) fail(ErrorKind::DimensionMismatch, "sparse column out of range");
        row[i][j] += v;
      }
      for (auto it = row[i].begin(); it != row[i].end();) {
        if (it->second == 0) {
          it = row[i].erase(it);
        } else {
          colrows[it->first].insert(i);
          ++it;
        }
      }
    }
    std::vector<bool> row_done(a.rows, false), col_done(a.cols, false);
    std::set<std::pair<std::size_t, std::size_t>> queue;  // (nnz, row)
    for (std::size_t i = 0; i < a.rows; ++i)
      if (!row[i].empty()) queue.emplace(row[i].size(), i);
    // columns met by a single live row pivot without fill-in
    std::set<std::size_t> singles;
    auto touch = [&](std::size_t c) {
      if (colrows[c].size() == 1 && !col_done[c]) singles.insert(c);
      else singles.erase(c);
    };
    for (std::size_t c = 0; c < a.cols; ++c) touch(c);

    auto requeue = [&](std::size_t r, std::size_t old_size) {
      queue.erase({old_size, r});
      if (!row[r].empty()) queue.emplace(row[r].size(), r);
    };

    for (;;) {
      std::size_t pr = a.rows, pc = a.cols;
      for (std::size_t c : singles) {
        const std::size_t r = *colrows[c].begin();
        const BigInt& v = row[r].at(c);
        if (v == 1 || v == -1) {
          pr = r;
          pc = c;
          break;
        }
      }
      if (pr == a.rows)
        for (const auto& [nnz, r] : queue) {
          std::size_t best_count = std::numeric_limits<std::size_t>::max();
          for (const auto& [c, v] : row[r])
            if ((v == 1 || v == -1) && colrows[c].size() < best_count) {
              best_count = colrows[c].size();
              pc = c;
            }
          if (pc != a.cols) {
            pr = r;
            break;
          }
        }
      if (pr == a.rows) break;
      const BigInt p = row[pr][pc];  // +-1, its own inverse
      const std::vector<std::size_t> targets(colrows[pc].begin(), colrows[pc].end());
      for (std::size_t r2 : targets) {
        if (r2 == pr) continue;
        const std::size_t old_size = row[r2].size();
        const BigInt f = row[r2][pc] * p;
        for (const auto& [c, v] : row[pr]) {
          BigInt& slot = row[r2][c];
          slot -= f * v;
          if (slot == 0) {
            row[r2].erase(c);
            colrows[c].erase(r2);
          } else {
            colrows[c].insert(r2);
          }
          touch(c);
        }
        ops_.push_back({r2, pr, f});
        requeue(r2, old_size);
      }
      Pivot piv{pr, pc, p, {}};
      col_done[pc] = true;
      for (const auto& [c, v] : row[pr]) {
        colrows[c].erase(pr);
        touch(c);
        if (c != pc) piv.rest.emplace_back(c, v);
      }
      queue.erase({row[pr].size(), pr});
      row[pr].clear();
      row_done[pr] = true;
      col_done[pc] = true;
      pivots_.push_back(std::move(piv));
    }

    for (std::size_t i = 0; i < a.rows; ++i)
      if (!row_done[i]) rest_rows_.push_back(i);
    std::vector<std::size_t> col_pos(a.cols, 0);
    for (std::size_t j = 0; j < a.cols; ++j)
      if (!col_done[j]) {
        col_pos[j] = rest_cols_.size();
        rest_cols_.push_back(j);
      }
    IntMatrix rem(rest_rows_.size(), rest_cols_.size());
    for (std::size_t i = 0; i < rest_rows_.size(); ++i)
      for (const auto& [c, v] : row[rest_rows_[i]]) rem(i, col_pos[c]) = v;
    smith_ = smith_normal_form(rem);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t rank() const { return pivots_.size() + smith_.rank; }
  std::size_t unit_pivots() const { return pivots_.size(); }
  std::size_t remainder_rows() const { return rest_rows_.size(); }
  std::size_t remainder_cols() const { return rest_cols_.size(); }

  /// Nonzero invariant factors of A (unit pivots contribute 1s).
  std::vector<BigInt> invariant_factors() const {
    std::vector<BigInt> out(pivots_.size(), BigInt(1));
    out.insert(out.end(), smith_.invariant_factors.begin(), smith_.invariant_factors.end());
    return out;
  }

  std::vector<BigInt> torsion() const {
    std::vector<BigInt> out;
    for (const auto& d : smith_.invariant_factors)
      if (d > 1) out.push_back(d);
    return out;
  }

  Solution solve(const std::vector<BigInt>& rhs) const {
    if (rhs.size() != rows_) fail(ErrorKind::DimensionMismatch, "right-hand side length differs from rows");
    std::vector<BigInt> w = rhs;
    for (const auto& op : ops_) w[op.target] -= op.factor * w[op.source];
    Solution sol;
    sol.solvable = true;
    const std::size_t m = rest_rows_.size();
    std::vector<BigInt> y(m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t k = 0; k < m; ++k)
        if (smith_.U(i, k) != 0) y[i] += smith_.U(i, k) * w[rest_rows_[k]];
    std::vector<BigInt> z(rest_cols_.size());
    for (std::size_t i = 0; i < m; ++i) {
      if (i < smith_.rank) {
        const BigInt& d = smith_.invariant_factors[i];
        BigInt r = y[i] % d;
        if (r < 0) r += d;
        if (d > 1) sol.torsion_coords.push_back(r);
        if (r != 0) sol.solvable = false;
        else z[i] = y[i] / d;
      } else {
        sol.free_coords.push_back(y[i]);
        if (y[i] != 0) sol.solvable = false;
      }
    }
    if (!sol.solvable) return sol;
    sol.x.assign(cols_, BigInt(0));
    for (std::size_t j = 0; j < rest_cols_.size(); ++j) {
      BigInt acc = 0;
      for (std::size_t k = 0; k < rest_cols_.size(); ++k)
        if (smith_.V(j, k) != 0) acc += smith_.V(j, k) * z[k];
      sol.x[rest_cols_[j]] = acc;
    }
    for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
      BigInt acc = w[it->row];
      for (const auto& [c, v] : it->rest) acc -= v * sol.x[c];
      sol.x[it->col] = it->sign * acc;
    }
    return sol;
  }

 private:
  struct Pivot {
    std::size_t row, col;
    BigInt sign;
    std::vector<std::pair<std::size_t, BigInt>> rest;
  };
  struct RowOp {
    std::size_t target, source;
    BigInt factor;
  };

  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Pivot> pivots_;
  std::vector<RowOp> ops_;
  std::vector<std::size_t> rest_rows_, rest_cols_;
  SmithResult smith_;
};

inline std::int64_t to_int64(const BigInt& x) {
  if (x > std::numeric_limits<std::int64_t>::max() || x < std::numeric_limits<std::int64_t>::min())
    fail(ErrorKind::InvalidInput, "integer exceeds 64 bits: " + x.str());
  return x.convert_to<std::int64_t>();
}

}  // namespace twosided

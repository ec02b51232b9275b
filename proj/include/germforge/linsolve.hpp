#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "germforge/rational.hpp"

namespace germforge {

/// Sparse linear-algebra coordinates: (column index, value) pairs kept
/// sorted by column.
using SparseVec = std::vector<std::pair<int, Rational>>;

namespace sparse {

inline void axpy(SparseVec& x, const Rational& lambda, const SparseVec& y) {
  SparseVec out;
  out.reserve(x.size() + y.size());
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
      out.push_back(x[i++]);
    } else if (i == x.size() || y[j].first < x[i].first) {
      Rational v = lambda * y[j].second;
      if (!is_zero(v)) out.emplace_back(y[j].first, v);
      ++j;
    } else {
      Rational v = x[i].second + lambda * y[j].second;
      if (!is_zero(v)) out.emplace_back(x[i].first, v);
      ++i;
      ++j;
    }
  }
  x = std::move(out);
}

inline void scale(SparseVec& x, const Rational& lambda) {
  for (auto& [c, v] : x) v *= lambda;
}

inline std::optional<Rational> lookup(const SparseVec& x, int col) {
  auto it = std::lower_bound(x.begin(), x.end(), col,
                             [](const auto& p, int c) { return p.first < c; });
  if (it == x.end() || it->first != col) return std::nullopt;
  return it->second;
}

}  // namespace sparse

/// Exact incremental row reduction with full Gauss-Jordan maintenance and
/// row provenance. Equations are added one at a time; the first equation
/// whose reduction yields 0 = nonzero exposes the inconsistent linear
/// combination of original equations (a Farkas witness).
class ExactLinearSolver {
 public:
  struct Inconsistency {
    /// Coefficients over original equation indices (order of add_equation).
    std::map<int, Rational> combination;
    /// The nonzero value the combined right-hand side reduces to.
    Rational rhs;
  };

  explicit ExactLinearSolver(int num_columns) : ncols_(num_columns) {}

  int equations_added() const { return next_id_; }
  int rank() const { return static_cast<int>(pivots_.size()); }

  /// Returns an inconsistency witness if the accumulated system just became
  /// unsolvable; nullopt when the equation was absorbed (or was redundant).
  std::optional<Inconsistency> add_equation(SparseVec lhs, Rational rhs) {
    const int id = next_id_++;
    Row row{std::move(lhs), std::move(rhs), {{id, Rational(1)}}};
    reduce(row);
    if (row.a.empty()) {
      if (is_zero(row.rhs)) return std::nullopt;  // redundant
      return Inconsistency{std::move(row.prov), std::move(row.rhs)};
    }
    // Normalize on the leading (smallest-index) column and back-substitute
    // into every stored row so the basis stays fully reduced.
    const int pivot_col = row.a.front().first;
    Rational inv = Rational(1) / row.a.front().second;
    sparse::scale(row.a, inv);
    row.rhs *= inv;
    for (auto& [c, v] : row.prov) v *= inv;
    for (auto& [col, other] : pivots_) {
      auto entry = sparse::lookup(other.a, pivot_col);
      if (!entry) continue;
      Rational lambda = -*entry;
      sparse::axpy(other.a, lambda, row.a);
      other.rhs += lambda * row.rhs;
      merge_prov(other.prov, lambda, row.prov);
    }
    pivots_.emplace(pivot_col, std::move(row));
    return std::nullopt;
  }

  /// Particular solution with all free columns set to zero.
  std::vector<Rational> solution() const {
    std::vector<Rational> x(static_cast<std::size_t>(ncols_), Rational(0));
    for (const auto& [col, row] : pivots_) x[static_cast<std::size_t>(col)] = row.rhs;
    return x;
  }

  bool is_pivot_column(int col) const { return pivots_.count(col) > 0; }

 private:
  struct Row {
    SparseVec a;
    Rational rhs;
    std::map<int, Rational> prov;
  };

  static void merge_prov(std::map<int, Rational>& into, const Rational& lambda,
                         const std::map<int, Rational>& from) {
    for (const auto& [id, v] : from) {
      auto [it, inserted] = into.emplace(id, lambda * v);
      if (!inserted) {
        it->second += lambda * v;
        if (is_zero(it->second)) into.erase(it);
      }
    }
  }

  void reduce(Row& row) const {
    // Pivot rows are fully reduced against each other, so one sweep in
    // increasing pivot order eliminates everything it can.
    for (const auto& [col, pivot] : pivots_) {
      auto entry = sparse::lookup(row.a, col);
      if (!entry) continue;
      Rational lambda = -*entry;
      sparse::axpy(row.a, lambda, pivot.a);
      row.rhs += lambda * pivot.rhs;
      merge_prov(row.prov, lambda, pivot.prov);
    }
  }

  int ncols_;
  int next_id_ = 0;
  std::map<int, Row> pivots_;
};

/// Incremental basis of a subspace spanned by inserted sparse vectors, with
/// provenance over the inserted vectors. Used for membership tests where
/// many targets are reduced against one fixed generating set.
class SpanBasis {
 public:
  /// Inserts a vector; returns false when it was already in the span.
  bool insert(SparseVec v) {
    const int id = next_id_++;
    std::map<int, Rational> prov{{id, Rational(1)}};
    reduce(v, prov);
    if (v.empty()) return false;
    const int pivot = v.front().first;
    Rational inv = Rational(1) / v.front().second;
    sparse::scale(v, inv);
    for (auto& [c, val] : prov) val *= inv;
    for (auto& [col, row] : basis_) {
      auto entry = sparse::lookup(row.v, pivot);
      if (!entry) continue;
      Rational lambda = -*entry;
      sparse::axpy(row.v, lambda, v);
      merge(row.prov, lambda, prov);
    }
    basis_.emplace(pivot, Entry{std::move(v), std::move(prov)});
    return true;
  }

  /// If target lies in the span, returns coefficients over inserted vectors
  /// (by insertion index) expressing it; otherwise nullopt.
  std::optional<std::map<int, Rational>> express(SparseVec target) const {
    std::map<int, Rational> combo;
    for (const auto& [col, row] : basis_) {
      auto entry = sparse::lookup(target, col);
      if (!entry) continue;
      Rational lambda = *entry;
      sparse::axpy(target, -lambda, row.v);
      for (const auto& [id, v] : row.prov) {
        auto [it, inserted] = combo.emplace(id, lambda * v);
        if (!inserted) {
          it->second += lambda * v;
          if (is_zero(it->second)) combo.erase(it);
        }
      }
    }
    if (!target.empty()) return std::nullopt;
    return combo;
  }

  int rank() const { return static_cast<int>(basis_.size()); }

 private:
  struct Entry {
    SparseVec v;
    std::map<int, Rational> prov;
  };

  static void merge(std::map<int, Rational>& into, const Rational& lambda,
                    const std::map<int, Rational>& from) {
    for (const auto& [id, v] : from) {
      auto [it, inserted] = into.emplace(id, lambda * v);
      if (!inserted) {
        it->second += lambda * v;
        if (is_zero(it->second)) into.erase(it);
      }
    }
  }

  void reduce(SparseVec& v, std::map<int, Rational>& prov) const {
    for (const auto& [col, row] : basis_) {
      auto entry = sparse::lookup(v, col);
      if (!entry) continue;
      Rational lambda = -*entry;
      sparse::axpy(v, lambda, row.v);
      merge(prov, lambda, row.prov);
    }
  }

  int next_id_ = 0;
  std::map<int, Entry> basis_;
};

}  // namespace germforge

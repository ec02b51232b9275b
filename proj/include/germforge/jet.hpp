#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "germforge/monomial.hpp"
#include "germforge/rational.hpp"

namespace germforge {

/// Sparse multivariate polynomial over exact rationals, truncated at a fixed
/// total degree. Terms above the truncation degree are discarded on every
/// operation; zero coefficients are never stored. Immutable in practice:
/// arithmetic produces fresh values.
class Jet {
 public:
  using TermMap = std::map<Expo, Rational, GrlexLess>;

  Jet(int dimension, int truncation_degree)
      : dim_(dimension), cap_(truncation_degree) {
    if (dimension <= 0) throw StructuralError("jet dimension must be positive");
    if (truncation_degree < 0) throw StructuralError("jet truncation degree must be non-negative");
  }

  static Jet zero(int dimension, int truncation_degree) {
    return Jet(dimension, truncation_degree);
  }

  static Jet constant(int dimension, int truncation_degree, const Rational& c) {
    Jet j(dimension, truncation_degree);
    j.add_term(Expo(dimension, 0), c);
    return j;
  }

  static Jet variable(int dimension, int truncation_degree, int var) {
    Jet j(dimension, truncation_degree);
    Expo e(dimension, 0);
    if (var < 0 || var >= dimension) throw StructuralError("variable index out of range");
    e[var] = 1;
    j.add_term(e, Rational(1));
    return j;
  }

  static Jet monomial(int dimension, int truncation_degree, const Expo& e,
                      const Rational& c = Rational(1)) {
    Jet j(dimension, truncation_degree);
    j.add_term(e, c);
    return j;
  }

  int dimension() const { return dim_; }
  int truncation_degree() const { return cap_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Rational coefficient(const Expo& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  Rational value_at_origin() const { return coefficient(Expo(dim_, 0)); }
  bool is_unit() const { return sgn(value_at_origin()) != 0; }

  /// Accumulates c * x^e, dropping the term if it cancels or exceeds the cap.
  Jet& add_term(const Expo& e, const Rational& c) {
    if (static_cast<int>(e.size()) != dim_)
      throw StructuralError("exponent vector has wrong dimension");
    if (sgn(c) == 0 || total_degree(e) > cap_) return *this;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (sgn(it->second) == 0) terms_.erase(it);
    }
    return *this;
  }

  /// Minimal total degree among stored terms; empty for the zero jet.
  std::optional<int> order() const {
    if (terms_.empty()) return std::nullopt;
    return total_degree(terms_.begin()->first);  // grlex: lowest degree first
  }

  Jet truncated(int new_cap) const {
    if (new_cap >= cap_) {
      Jet j = *this;
      j.cap_ = new_cap;
      return j;
    }
    Jet j(dim_, new_cap);
    for (const auto& [e, c] : terms_) j.add_term(e, c);
    return j;
  }

  Jet homogeneous_part(int k) const {
    Jet j(dim_, cap_);
    for (const auto& [e, c] : terms_)
      if (total_degree(e) == k) j.add_term(e, c);
    return j;
  }

  /// Partial derivative; the result is only trusted one degree lower.
  Jet derivative(int var) const {
    if (cap_ < 1) throw StructuralError("cannot differentiate a degree-0 jet");
    Jet j(dim_, cap_ - 1);
    for (const auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      Expo f = e;
      f[var] -= 1;
      Rational coef = c * e[var];
      j.add_term(f, coef);
    }
    return j;
  }

  Jet scaled(const Rational& c) const {
    Jet j(dim_, cap_);
    if (sgn(c) == 0) return j;
    for (const auto& [e, coef] : terms_) {
      Rational v = coef * c;
      j.add_term(e, v);
    }
    return j;
  }

  Jet operator-() const { return scaled(Rational(-1)); }

  friend Jet operator+(const Jet& a, const Jet& b) {
    a.require_same_shape(b);
    Jet j = a;
    for (const auto& [e, c] : b.terms_) j.add_term(e, c);
    return j;
  }

  friend Jet operator-(const Jet& a, const Jet& b) {
    a.require_same_shape(b);
    Jet j = a;
    for (const auto& [e, c] : b.terms_) {
      Rational v = -c;
      j.add_term(e, v);
    }
    return j;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.require_same_shape(b);
    Jet j(a.dim_, a.cap_);
    for (const auto& [ea, ca] : a.terms_) {
      const int da = total_degree(ea);
      for (const auto& [eb, cb] : b.terms_) {
        if (da + total_degree(eb) > a.cap_) continue;
        Rational v = ca * cb;
        j.add_term(expo_sum(ea, eb), v);
      }
    }
    return j;
  }

  friend bool operator==(const Jet& a, const Jet& b) {
    return a.dim_ == b.dim_ && a.cap_ == b.cap_ && a.terms_ == b.terms_;
  }

  void require_same_shape(const Jet& other) const {
    if (dim_ != other.dim_)
      throw StructuralError("jet dimension mismatch");
    if (cap_ != other.cap_)
      throw StructuralError("jet truncation degree mismatch");
  }

 private:
  int dim_;
  int cap_;
  TermMap terms_;
};

inline bool is_zero(const Jet& j) { return j.is_zero(); }

/// Terms of total degree <= k agree.
inline bool equal_up_to_degree(const Jet& a, const Jet& b, int k) {
  if (a.dimension() != b.dimension()) return false;
  Jet d = a.truncated(k) - b.truncated(k);
  return d.is_zero();
}

inline int common_cap(const Jet& a, const Jet& b) {
  return std::min(a.truncation_degree(), b.truncation_degree());
}

inline Jet jet_add(const Jet& a, const Jet& b) {
  const int c = common_cap(a, b);
  return a.truncated(c) + b.truncated(c);
}

inline Jet jet_sub(const Jet& a, const Jet& b) {
  const int c = common_cap(a, b);
  return a.truncated(c) - b.truncated(c);
}

inline Jet jet_mul(const Jet& a, const Jet& b) {
  const int c = common_cap(a, b);
  return a.truncated(c) * b.truncated(c);
}

inline Jet jet_pow(const Jet& a, int e) {
  if (e < 0) throw StructuralError("negative jet power");
  Jet r = Jet::constant(a.dimension(), a.truncation_degree(), Rational(1));
  for (int i = 0; i < e; ++i) r = r * a;
  return r;
}

/// Inverse of a unit jet by the geometric series on its maximal-ideal part:
/// u = c(1 + m) with m(0) = 0 gives u^-1 = (1/c) * sum (-m)^k, truncated.
inline Jet invert_unit(const Jet& u) {
  Rational c = u.value_at_origin();
  if (is_zero(c)) throw NotAUnitError("jet vanishes at the origin");
  const int dim = u.dimension();
  const int cap = u.truncation_degree();
  Rational cinv = Rational(1) / c;
  Jet m = (u - Jet::constant(dim, cap, c)).scaled(cinv);
  Jet one = Jet::constant(dim, cap, Rational(1));
  Jet acc = one;  // acc = sum_{k<=i} (-m)^k after i rounds, via acc = 1 - m*acc
  for (int i = 0; i < cap; ++i) acc = one - m * acc;
  return acc.scaled(cinv);
}

/// order_at_origin of a product is additive; exposed for order bookkeeping.
inline std::optional<int> order_of_product(const Jet& a, const Jet& b) {
  auto oa = a.order();
  auto ob = b.order();
  if (!oa || !ob) return std::nullopt;
  return *oa + *ob;
}

/// Substitute a univariate curve (one Jet of dimension 1 per variable,
/// each vanishing-or-not at 0 as given) into a jet, producing a dimension-1
/// jet in the curve parameter.
inline Jet compose_curve(const Jet& f, const std::vector<Jet>& curve) {
  if (static_cast<int>(curve.size()) != f.dimension())
    throw StructuralError("curve has wrong number of components");
  int cap = f.truncation_degree();
  for (const auto& g : curve) {
    if (g.dimension() != 1) throw StructuralError("curve components must be univariate");
    cap = std::min(cap, g.truncation_degree());
  }
  Jet out = Jet::zero(1, cap);
  for (const auto& [e, c] : f.terms()) {
    Jet term = Jet::constant(1, cap, c);
    for (int i = 0; i < f.dimension() && !term.is_zero(); ++i)
      term = term * jet_pow(curve[i].truncated(cap), e[i]);
    out = out + term;
  }
  return out;
}

}  // namespace germforge

#pragma once

#include <algorithm>
#include <vector>

#include "germforge/jet.hpp"

namespace germforge {

/// Polynomial in the deformation parameter t, truncated at a fixed t-order,
/// with Jet coefficients sharing one dimension and truncation degree.
class TPoly {
 public:
  TPoly(int dimension, int truncation_degree, int t_order)
      : dim_(dimension), cap_(truncation_degree), torder_(t_order) {
    if (t_order < 0) throw StructuralError("t-order must be non-negative");
    coeff_.assign(static_cast<std::size_t>(t_order) + 1,
                  Jet::zero(dimension, truncation_degree));
  }

  static TPoly from_jet(const Jet& j, int t_order) {
    TPoly p(j.dimension(), j.truncation_degree(), t_order);
    p.coeff_[0] = j;
    return p;
  }

  static TPoly one(int dimension, int truncation_degree, int t_order) {
    return from_jet(Jet::constant(dimension, truncation_degree, Rational(1)), t_order);
  }

  int dimension() const { return dim_; }
  int truncation_degree() const { return cap_; }
  int t_order() const { return torder_; }

  const Jet& coefficient(int j) const {
    if (j < 0 || j > torder_) throw StructuralError("t-coefficient index out of range");
    return coeff_[static_cast<std::size_t>(j)];
  }

  void set_coefficient(int j, const Jet& value) {
    if (j < 0 || j > torder_) throw StructuralError("t-coefficient index out of range");
    if (value.dimension() != dim_) throw StructuralError("jet dimension mismatch");
    coeff_[static_cast<std::size_t>(j)] = value.truncated(cap_);
  }

  const Jet& t0() const { return coeff_[0]; }

  bool is_zero() const {
    return std::all_of(coeff_.begin(), coeff_.end(),
                       [](const Jet& j) { return j.is_zero(); });
  }

  TPoly truncated_t(int new_torder) const {
    TPoly p(dim_, cap_, new_torder);
    for (int j = 0; j <= std::min(new_torder, torder_); ++j) p.coeff_[j] = coeff_[j];
    return p;
  }

  TPoly truncated_x(int new_cap) const {
    TPoly p(dim_, new_cap, torder_);
    for (int j = 0; j <= torder_; ++j) p.coeff_[j] = coeff_[j].truncated(new_cap);
    return p;
  }

  TPoly scaled(const Rational& c) const {
    TPoly p(dim_, cap_, torder_);
    for (int j = 0; j <= torder_; ++j) p.coeff_[j] = coeff_[j].scaled(c);
    return p;
  }

  TPoly operator-() const { return scaled(Rational(-1)); }

  /// d/dt; drops the t-order by one.
  TPoly derivative_t() const {
    TPoly p(dim_, cap_, std::max(0, torder_ - 1));
    for (int j = 1; j <= torder_; ++j)
      p.coeff_[j - 1] = coeff_[j].scaled(Rational(j));
    return p;
  }

  friend TPoly align_binary(const TPoly& a, const TPoly& b) {
    return TPoly(a.dim_, std::min(a.cap_, b.cap_), std::min(a.torder_, b.torder_));
  }

  friend TPoly operator+(const TPoly& a, const TPoly& b) {
    a.require_same_dim(b);
    TPoly p = align_binary(a, b);
    for (int j = 0; j <= p.torder_; ++j)
      p.coeff_[j] = a.coeff_[j].truncated(p.cap_) + b.coeff_[j].truncated(p.cap_);
    return p;
  }

  friend TPoly operator-(const TPoly& a, const TPoly& b) {
    a.require_same_dim(b);
    TPoly p = align_binary(a, b);
    for (int j = 0; j <= p.torder_; ++j)
      p.coeff_[j] = a.coeff_[j].truncated(p.cap_) - b.coeff_[j].truncated(p.cap_);
    return p;
  }

  friend TPoly operator*(const TPoly& a, const TPoly& b) {
    a.require_same_dim(b);
    TPoly p = align_binary(a, b);
    for (int ja = 0; ja <= std::min(a.torder_, p.torder_); ++ja) {
      if (a.coeff_[ja].is_zero()) continue;
      Jet ca = a.coeff_[ja].truncated(p.cap_);
      for (int jb = 0; ja + jb <= p.torder_ && jb <= b.torder_; ++jb) {
        if (b.coeff_[jb].is_zero()) continue;
        p.coeff_[ja + jb] = p.coeff_[ja + jb] + ca * b.coeff_[jb].truncated(p.cap_);
      }
    }
    return p;
  }

  friend bool operator==(const TPoly& a, const TPoly& b) {
    return a.dim_ == b.dim_ && a.cap_ == b.cap_ && a.torder_ == b.torder_ &&
           a.coeff_ == b.coeff_;
  }

  void require_same_dim(const TPoly& other) const {
    if (dim_ != other.dim_) throw StructuralError("t-polynomial dimension mismatch");
  }

 private:
  int dim_;
  int cap_;
  int torder_;
  std::vector<Jet> coeff_;
};

inline bool is_zero(const TPoly& p) { return p.is_zero(); }

/// Inverse of a t-series whose t^0 coefficient is a unit jet.
/// Factor out the t^0 part, then run the geometric series in t.
inline TPoly invert_unit(const TPoly& u) {
  if (!u.t0().is_unit())
    throw NotAUnitError("t^0 coefficient is not a unit jet");
  const int K = u.t_order();
  Jet u0inv = invert_unit(u.t0());
  TPoly normalized = u * TPoly::from_jet(u0inv, K);  // 1 + t * (...)
  TPoly rest = normalized;
  rest.set_coefficient(0, Jet::zero(u.dimension(), rest.truncation_degree()));
  TPoly one = TPoly::one(u.dimension(), rest.truncation_degree(), K);
  TPoly acc = one;
  for (int i = 0; i < K; ++i) acc = one - rest * acc;
  return acc * TPoly::from_jet(u0inv, K);
}

}  // namespace germforge

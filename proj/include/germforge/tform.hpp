#pragma once

#include <algorithm>
#include <vector>

#include "germforge/pform.hpp"
#include "germforge/tpoly.hpp"

namespace germforge {

/// Polynomial in t with p-form coefficients: the shape of deformation
/// families, of d_x applied to t-series, and of weighted pullbacks.
class TForm {
 public:
  TForm(int form_degree, int dimension, int truncation_degree, int t_order)
      : p_(form_degree), dim_(dimension), cap_(truncation_degree), torder_(t_order) {
    if (t_order < 0) throw StructuralError("t-order must be non-negative");
    coeff_.assign(static_cast<std::size_t>(t_order) + 1,
                  PForm::zero(form_degree, dimension, truncation_degree));
  }

  static TForm from_pform(const PForm& f, int t_order) {
    TForm tf(f.form_degree(), f.dimension(), f.truncation_degree(), t_order);
    tf.coeff_[0] = f;
    return tf;
  }

  static TForm from_tpoly(const TPoly& p) {
    TForm tf(0, p.dimension(), p.truncation_degree(), p.t_order());
    for (int j = 0; j <= p.t_order(); ++j)
      tf.coeff_[j] = PForm::from_jet(p.coefficient(j));
    return tf;
  }

  int form_degree() const { return p_; }
  int dimension() const { return dim_; }
  int truncation_degree() const { return cap_; }
  int t_order() const { return torder_; }

  const PForm& coefficient(int j) const {
    if (j < 0 || j > torder_) throw StructuralError("t-coefficient index out of range");
    return coeff_[static_cast<std::size_t>(j)];
  }

  void set_coefficient(int j, const PForm& value) {
    if (j < 0 || j > torder_) throw StructuralError("t-coefficient index out of range");
    if (value.dimension() != dim_ || value.form_degree() != p_)
      throw StructuralError("coefficient form mismatch");
    coeff_[static_cast<std::size_t>(j)] = value.truncated(cap_);
  }

  bool is_zero() const {
    return std::all_of(coeff_.begin(), coeff_.end(),
                       [](const PForm& f) { return f.is_zero(); });
  }

  TPoly as_tpoly() const {
    if (p_ != 0) throw StructuralError("as_tpoly on a form of positive degree");
    TPoly p(dim_, cap_, torder_);
    for (int j = 0; j <= torder_; ++j) p.set_coefficient(j, coeff_[j].as_jet());
    return p;
  }

  TForm truncated_t(int new_torder) const {
    TForm tf(p_, dim_, cap_, new_torder);
    for (int j = 0; j <= std::min(new_torder, torder_); ++j) tf.coeff_[j] = coeff_[j];
    return tf;
  }

  TForm truncated_x(int new_cap) const {
    TForm tf(p_, dim_, new_cap, torder_);
    for (int j = 0; j <= torder_; ++j) tf.coeff_[j] = coeff_[j].truncated(new_cap);
    return tf;
  }

  TForm scaled(const Rational& c) const {
    TForm tf(p_, dim_, cap_, torder_);
    for (int j = 0; j <= torder_; ++j) tf.coeff_[j] = coeff_[j].scaled(c);
    return tf;
  }

  TForm operator-() const { return scaled(Rational(-1)); }

  friend TForm operator+(const TForm& a, const TForm& b) {
    a.require_compatible(b);
    TForm tf(a.p_, a.dim_, std::min(a.cap_, b.cap_), std::min(a.torder_, b.torder_));
    for (int j = 0; j <= tf.torder_; ++j)
      tf.coeff_[j] = a.coeff_[j].truncated(tf.cap_) + b.coeff_[j].truncated(tf.cap_);
    return tf;
  }

  friend TForm operator-(const TForm& a, const TForm& b) { return a + (-b); }

  friend bool operator==(const TForm& a, const TForm& b) {
    return a.p_ == b.p_ && a.dim_ == b.dim_ && a.cap_ == b.cap_ &&
           a.torder_ == b.torder_ && a.coeff_ == b.coeff_;
  }

  void require_compatible(const TForm& other) const {
    if (dim_ != other.dim_) throw StructuralError("t-form dimension mismatch");
    if (p_ != other.p_) throw StructuralError("t-form degree mismatch");
  }

  /// Value at t = 1: the plain sum of all coefficients. Exact only when the
  /// t-range of the series covers everything (no truncated tail).
  PForm evaluated_at_one() const {
    PForm acc = coeff_[0];
    for (int j = 1; j <= torder_; ++j) acc = acc + coeff_[j];
    return acc;
  }

 private:
  int p_;
  int dim_;
  int cap_;
  int torder_;
  std::vector<PForm> coeff_;
};

inline bool is_zero(const TForm& f) { return f.is_zero(); }

inline TForm exterior_d(const TForm& a) {
  TForm out(a.form_degree() + 1, a.dimension(), a.truncation_degree() - 1, a.t_order());
  for (int j = 0; j <= a.t_order(); ++j) {
    if (a.coefficient(j).is_zero()) continue;
    out.set_coefficient(j, exterior_d(a.coefficient(j)));
  }
  return out;
}

inline TForm exterior_d_x(const TPoly& p) { return exterior_d(TForm::from_tpoly(p)); }

inline TForm wedge(const TForm& a, const TForm& b) {
  if (a.dimension() != b.dimension()) throw StructuralError("t-form dimension mismatch");
  TForm out(a.form_degree() + b.form_degree(), a.dimension(),
            std::min(a.truncation_degree(), b.truncation_degree()),
            std::min(a.t_order(), b.t_order()));
  for (int ja = 0; ja <= std::min(a.t_order(), out.t_order()); ++ja) {
    if (a.coefficient(ja).is_zero()) continue;
    for (int jb = 0; ja + jb <= out.t_order() && jb <= b.t_order(); ++jb) {
      if (b.coefficient(jb).is_zero()) continue;
      PForm w = wedge(a.coefficient(ja), b.coefficient(jb));
      out.set_coefficient(ja + jb, out.coefficient(ja + jb) + w);
    }
  }
  return out;
}

/// Multiply a t-form by a scalar t-polynomial (convolution in t).
inline TForm scale_by_tpoly(const TForm& a, const TPoly& s) {
  if (a.dimension() != s.dimension()) throw StructuralError("t-form dimension mismatch");
  TForm out(a.form_degree(), a.dimension(),
            std::min(a.truncation_degree(), s.truncation_degree()),
            std::min(a.t_order(), s.t_order()));
  for (int ja = 0; ja <= std::min(a.t_order(), out.t_order()); ++ja) {
    if (a.coefficient(ja).is_zero()) continue;
    for (int jb = 0; ja + jb <= out.t_order() && jb <= s.t_order(); ++jb) {
      if (s.coefficient(jb).is_zero()) continue;
      PForm w = a.coefficient(ja).scaled_by(s.coefficient(jb));
      out.set_coefficient(ja + jb, out.coefficient(ja + jb) + w);
    }
  }
  return out;
}

/// Largest t-exponent the weighted substitution can produce on this form.
inline int pullback_t_range(const PForm& alpha, const WeightVector& w) {
  int best = 0;
  for (const auto& [tuple, jet] : alpha.components()) {
    int tuple_weight = 0;
    for (int i : tuple) tuple_weight += w.weights[i];
    for (const auto& [e, c] : jet.terms())
      best = std::max(best, weighted_degree(w, e) + tuple_weight);
  }
  return best;
}

/// sigma_t pullback along x_i -> t^{w_i} x_i, dx_i -> t^{w_i} dx_i.
/// Every monomial keeps its exponents; it just acquires the t-power equal to
/// its weighted degree (plus the weights of the differentials it multiplies).
/// t stays a formal graded variable; the result is organized by t-power.
inline TForm pullback_weighted(const PForm& alpha, const WeightVector& w,
                               int t_order = -1) {
  if (static_cast<int>(w.weights.size()) != alpha.dimension())
    throw StructuralError("weight vector dimension mismatch");
  for (int wi : w.weights)
    if (wi <= 0) throw StructuralError("weights must be positive");
  const int range = pullback_t_range(alpha, w);
  const int K = t_order < 0 ? range : t_order;
  TForm out(alpha.form_degree(), alpha.dimension(), alpha.truncation_degree(), K);
  for (const auto& [tuple, jet] : alpha.components()) {
    int tuple_weight = 0;
    for (int i : tuple) tuple_weight += w.weights[i];
    for (const auto& [e, c] : jet.terms()) {
      const int power = weighted_degree(w, e) + tuple_weight;
      if (power > K) continue;
      PForm slot = out.coefficient(power);
      slot.add_component(tuple, Jet::monomial(alpha.dimension(),
                                              alpha.truncation_degree(), e, c));
      out.set_coefficient(power, slot);
    }
  }
  return out;
}

}  // namespace germforge

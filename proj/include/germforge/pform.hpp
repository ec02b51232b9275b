#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "germforge/jet.hpp"

namespace germforge {

/// Index tuple of a basis p-form dx_{i1} ^ ... ^ dx_{ip}, strictly increasing.
using IndexTuple = std::vector<int>;

/// Differential p-form (p in 0..3) with Jet coefficients, indexed by strictly
/// increasing tuples. A 0-form is a single Jet stored at the empty tuple.
/// Forms of degree 4 and above are never needed: the engine only ever wedges
/// up to omega ^ d(omega).
class PForm {
 public:
  using ComponentMap = std::map<IndexTuple, Jet>;

  PForm(int form_degree, int dimension, int truncation_degree)
      : p_(form_degree), dim_(dimension), cap_(truncation_degree) {
    if (form_degree < 0 || form_degree > 3)
      throw StructuralError("form degree must be between 0 and 3");
    if (dimension <= 0) throw StructuralError("form dimension must be positive");
    if (truncation_degree < 0) throw StructuralError("form truncation degree must be non-negative");
  }

  static PForm zero(int form_degree, int dimension, int truncation_degree) {
    return PForm(form_degree, dimension, truncation_degree);
  }

  static PForm from_jet(const Jet& j) {
    PForm f(0, j.dimension(), j.truncation_degree());
    f.set_component({}, j);
    return f;
  }

  /// The coordinate 1-form dx_i.
  static PForm basis_one_form(int dimension, int truncation_degree, int var) {
    PForm f(1, dimension, truncation_degree);
    f.set_component({var}, Jet::constant(dimension, truncation_degree, Rational(1)));
    return f;
  }

  int form_degree() const { return p_; }
  int dimension() const { return dim_; }
  int truncation_degree() const { return cap_; }
  const ComponentMap& components() const { return comp_; }
  bool is_zero() const { return comp_.empty(); }

  Jet component(const IndexTuple& t) const {
    auto it = comp_.find(t);
    return it == comp_.end() ? Jet::zero(dim_, cap_) : it->second;
  }

  Jet as_jet() const {
    if (p_ != 0) throw StructuralError("as_jet on a form of positive degree");
    return component({});
  }

  void set_component(const IndexTuple& t, const Jet& value) {
    validate_tuple(t);
    if (value.dimension() != dim_) throw StructuralError("component dimension mismatch");
    Jet v = value.truncated(cap_);
    if (v.is_zero())
      comp_.erase(t);
    else
      comp_.insert_or_assign(t, std::move(v));
  }

  void add_component(const IndexTuple& t, const Jet& value) {
    validate_tuple(t);
    auto it = comp_.find(t);
    if (it == comp_.end()) {
      set_component(t, value);
      return;
    }
    Jet v = it->second + value.truncated(cap_);
    if (v.is_zero())
      comp_.erase(it);
    else
      it->second = std::move(v);
  }

  /// Minimal total degree among all component terms (algebraic multiplicity
  /// of the form at the origin); empty for the zero form.
  std::optional<int> order() const {
    std::optional<int> best;
    for (const auto& [t, j] : comp_) {
      auto o = j.order();
      if (o && (!best || *o < *best)) best = o;
    }
    return best;
  }

  PForm truncated(int new_cap) const {
    PForm f(p_, dim_, new_cap);
    for (const auto& [t, j] : comp_) f.set_component(t, j.truncated(new_cap));
    return f;
  }

  PForm scaled(const Rational& c) const {
    PForm f(p_, dim_, cap_);
    for (const auto& [t, j] : comp_) f.set_component(t, j.scaled(c));
    return f;
  }

  PForm operator-() const { return scaled(Rational(-1)); }

  /// Multiply every component by a scalar jet (0-form), aligning caps.
  PForm scaled_by(const Jet& s) const {
    const int c = std::min(cap_, s.truncation_degree());
    PForm f(p_, dim_, c);
    Jet st = s.truncated(c);
    for (const auto& [t, j] : comp_) f.set_component(t, j.truncated(c) * st);
    return f;
  }

  friend PForm operator+(const PForm& a, const PForm& b) {
    a.require_compatible(b);
    const int c = std::min(a.cap_, b.cap_);
    PForm f = a.truncated(c);
    for (const auto& [t, j] : b.comp_) f.add_component(t, j.truncated(c));
    return f;
  }

  friend PForm operator-(const PForm& a, const PForm& b) { return a + (-b); }

  friend bool operator==(const PForm& a, const PForm& b) {
    return a.p_ == b.p_ && a.dim_ == b.dim_ && a.cap_ == b.cap_ && a.comp_ == b.comp_;
  }

  void require_compatible(const PForm& other) const {
    if (dim_ != other.dim_) throw StructuralError("form dimension mismatch");
    if (p_ != other.p_) throw StructuralError("form degree mismatch");
  }

 private:
  void validate_tuple(const IndexTuple& t) const {
    if (static_cast<int>(t.size()) != p_)
      throw StructuralError("index tuple length does not match form degree");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] < 0 || t[i] >= dim_) throw StructuralError("index tuple entry out of range");
      if (i > 0 && t[i - 1] >= t[i])
        throw StructuralError("index tuple must be strictly increasing");
    }
  }

  int p_;
  int dim_;
  int cap_;
  ComponentMap comp_;
};

inline bool is_zero(const PForm& f) { return f.is_zero(); }

inline bool equal_up_to_degree(const PForm& a, const PForm& b, int k) {
  if (a.dimension() != b.dimension() || a.form_degree() != b.form_degree()) return false;
  PForm d = a.truncated(k) - b.truncated(k);
  return d.is_zero();
}

namespace detail {
/// Merge two strictly increasing tuples; returns the permutation sign,
/// or 0 when they share an index.
inline int merge_tuples(const IndexTuple& s, const IndexTuple& t, IndexTuple& out) {
  int inversions = 0;
  for (int a : s)
    for (int b : t) {
      if (a == b) return 0;
      if (a > b) ++inversions;
    }
  out.resize(s.size() + t.size());
  std::merge(s.begin(), s.end(), t.begin(), t.end(), out.begin());
  return (inversions % 2 == 0) ? 1 : -1;
}
}  // namespace detail

/// Exterior derivative. Consumes one degree of trust: the result's
/// truncation degree is one lower than the input's.
inline PForm exterior_d(const PForm& a) {
  if (a.form_degree() >= 3)
    throw StructuralError("exterior derivative of a 3-form is not supported");
  if (a.truncation_degree() < 1)
    throw StructuralError("cannot differentiate a degree-0 truncation");
  PForm out(a.form_degree() + 1, a.dimension(), a.truncation_degree() - 1);
  for (const auto& [t, j] : a.components()) {
    for (int i = 0; i < a.dimension(); ++i) {
      if (std::find(t.begin(), t.end(), i) != t.end()) continue;
      Jet dj = j.derivative(i);
      if (dj.is_zero()) continue;
      IndexTuple merged;
      int sign = detail::merge_tuples({i}, t, merged);
      out.add_component(merged, sign == 1 ? dj : -dj);
    }
  }
  return out;
}

inline PForm exterior_d(const Jet& j) { return exterior_d(PForm::from_jet(j)); }

/// Graded-anticommutative wedge product; total degree is capped at 3.
inline PForm wedge(const PForm& a, const PForm& b) {
  if (a.dimension() != b.dimension()) throw StructuralError("form dimension mismatch");
  const int p = a.form_degree() + b.form_degree();
  if (p > 3) throw StructuralError("wedge product above degree 3 is not supported");
  const int cap = std::min(a.truncation_degree(), b.truncation_degree());
  PForm out(p, a.dimension(), cap);
  for (const auto& [s, js] : a.components()) {
    Jet jst = js.truncated(cap);
    for (const auto& [t, jt] : b.components()) {
      IndexTuple merged;
      int sign = detail::merge_tuples(s, t, merged);
      if (sign == 0) continue;
      Jet prod = jst * jt.truncated(cap);
      out.add_component(merged, sign == 1 ? prod : -prod);
    }
  }
  return out;
}

/// omega ^ d(omega); identically zero exactly when the 1-form is integrable
/// to the trusted order.
inline PForm integrability_residual(const PForm& omega) {
  if (omega.form_degree() != 1)
    throw StructuralError("integrability residual is defined for 1-forms");
  return wedge(omega, exterior_d(omega));
}

/// Primitive of an exactly closed polynomial 1-form via radial integration:
/// h(x) = sum_i integral_0^1 x_i b_i(sx) ds, so h(0) = 0 and dh = beta.
inline Jet radial_integrate(const PForm& beta) {
  if (beta.form_degree() != 1)
    throw StructuralError("radial integration is defined for 1-forms");
  Jet h = Jet::zero(beta.dimension(), beta.truncation_degree() + 1);
  for (const auto& [t, j] : beta.components()) {
    const int var = t[0];
    for (const auto& [e, c] : j.terms()) {
      Expo f = e;
      f[var] += 1;
      Rational v = c / Rational(total_degree(e) + 1);
      h.add_term(f, v);
    }
  }
  return h;
}

/// Weight vector of a quasi-homogeneous grading: level d and one positive
/// weight per variable.
struct WeightVector {
  int d = 0;
  std::vector<int> weights;

  bool strict() const {
    if (d <= 0) return false;
    return std::all_of(weights.begin(), weights.end(), [](int w) { return w > 0; });
  }
};

inline int weighted_degree(const WeightVector& w, const Expo& e) {
  int deg = 0;
  for (std::size_t i = 0; i < e.size(); ++i) deg += w.weights[i] * e[i];
  return deg;
}

}  // namespace germforge

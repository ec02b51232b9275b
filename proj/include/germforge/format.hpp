#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "germforge/decompose.hpp"
#include "germforge/tform.hpp"

namespace germforge {

/// Canonical, re-parseable text forms. Terms are printed in decreasing
/// graded-lexicographic order with rationals in lowest terms, so identical
/// values always print identically.

inline std::string monomial_string(const Expo& e, const std::vector<std::string>& names) {
  std::ostringstream os;
  bool any = false;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (any) os << "*";
    os << names[i];
    if (e[i] > 1) os << "^" << e[i];
    any = true;
  }
  return any ? os.str() : std::string();
}

inline std::string jet_string(const Jet& j, const std::vector<std::string>& names) {
  if (j.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = j.terms().rbegin(); it != j.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    const bool negative = sgn(c) < 0;
    Rational mag = abs(c);
    if (first) {
      if (negative) os << "-";
      first = false;
    } else {
      os << (negative ? " - " : " + ");
    }
    std::string mono = monomial_string(e, names);
    if (mono.empty()) {
      os << rational_string(mag);
    } else {
      if (mag != 1) os << rational_string(mag) << "*";
      os << mono;
    }
  }
  return os.str();
}

inline std::string tuple_string(const IndexTuple& t, const std::vector<std::string>& names) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) os << "*";
    os << "d" << names[static_cast<std::size_t>(t[i])];
  }
  return os.str();
}

inline std::string pform_string(const PForm& f, const std::vector<std::string>& names) {
  if (f.form_degree() == 0) return jet_string(f.as_jet(), names);
  if (f.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [t, j] : f.components()) {
    if (!first) os << " + ";
    first = false;
    os << "(" << jet_string(j, names) << ")*" << tuple_string(t, names);
  }
  return os.str();
}

inline std::string tpoly_string(const TPoly& p, const std::vector<std::string>& names) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int j = 0; j <= p.t_order(); ++j) {
    if (p.coefficient(j).is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    if (j == 0) {
      os << "(" << jet_string(p.coefficient(j), names) << ")";
    } else {
      os << "t";
      if (j > 1) os << "^" << j;
      os << "*(" << jet_string(p.coefficient(j), names) << ")";
    }
  }
  return os.str();
}

inline std::string tform_string(const TForm& f, const std::vector<std::string>& names) {
  if (f.form_degree() == 0) return tpoly_string(f.as_tpoly(), names);
  if (f.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int j = 0; j <= f.t_order(); ++j) {
    if (f.coefficient(j).is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    if (j == 0) {
      os << "(" << pform_string(f.coefficient(j), names) << ")";
    } else {
      os << "t";
      if (j > 1) os << "^" << j;
      os << "*(" << pform_string(f.coefficient(j), names) << ")";
    }
  }
  return os.str();
}

inline std::string row_key_string(const RowKey& k, const std::vector<std::string>& names) {
  std::ostringstream os;
  os << "deg " << k.degree << " | ";
  os << (k.component.empty() ? std::string("scalar") : tuple_string(k.component, names));
  os << " | ";
  std::string mono = monomial_string(k.mono, names);
  os << (mono.empty() ? "1" : mono);
  return os.str();
}

}  // namespace germforge

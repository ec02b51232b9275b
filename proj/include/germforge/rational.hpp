#pragma once

#include <gmpxx.h>

#include <string>

#include "germforge/errors.hpp"

namespace germforge {

/// Exact rational scalar. GMP keeps values canonical (lowest terms,
/// positive denominator) through arithmetic; only raw (num, den)
/// construction needs an explicit canonicalize, which make_rational does.
using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  if (den == 0) throw StructuralError("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline bool is_zero(const Rational& q) { return sgn(q) == 0; }

/// Canonical text form: "p" or "p/q" with q > 1, lowest terms.
inline std::string rational_string(const Rational& q) { return q.get_str(); }

}  // namespace germforge

#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "germforge/errors.hpp"

namespace germforge {

/// Exponent vector of a monomial; one entry per ambient variable.
using Expo = std::vector<int>;

inline int total_degree(const Expo& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

/// Graded lexicographic order: lower total degree first, then plain
/// lexicographic comparison of the exponent sequences. This is the one
/// monomial order used everywhere (term maps, unknown columns, row order),
/// which is what makes all pivoting and printed output reproducible.
struct GrlexLess {
  bool operator()(const Expo& a, const Expo& b) const {
    const int da = total_degree(a);
    const int db = total_degree(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

inline Expo expo_sum(const Expo& a, const Expo& b) {
  Expo r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

/// a - b if all entries stay non-negative.
inline bool expo_try_sub(const Expo& a, const Expo& b, Expo& out) {
  out.assign(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = a[i] - b[i];
    if (out[i] < 0) return false;
  }
  return true;
}

namespace detail {
inline void enumerate_degree(int dim, int pos, int remaining, Expo& cur,
                             std::vector<Expo>& out) {
  if (pos == dim - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    cur[pos] = e;
    enumerate_degree(dim, pos + 1, remaining - e, cur, out);
  }
}
}  // namespace detail

/// All exponent vectors of exactly the given total degree, in grlex order.
inline std::vector<Expo> monomials_of_degree(int dim, int degree) {
  if (dim <= 0) throw StructuralError("monomials_of_degree: dimension must be positive");
  std::vector<Expo> out;
  Expo cur(dim, 0);
  detail::enumerate_degree(dim, 0, degree, cur, out);
  return out;
}

inline std::vector<Expo> monomials_up_to_degree(int dim, int degree) {
  std::vector<Expo> out;
  for (int k = 0; k <= degree; ++k) {
    auto level = monomials_of_degree(dim, k);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

}  // namespace germforge

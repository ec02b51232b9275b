#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "germforge/linsolve.hpp"
#include "germforge/pform.hpp"

namespace germforge {

/// One unknown coordinate of a graded system: a monomial slot inside a named
/// jet (block "a", "eta" with component index, "q", ...).
struct ColumnKey {
  std::string block;
  int sub = 0;
  Expo mono;
};

/// One equation of a graded system: the coefficient of a monomial in one
/// component of a form identity, labeled by its homogeneous degree.
struct RowKey {
  int degree = 0;
  IndexTuple component;
  Expo mono;

  friend bool operator<(const RowKey& a, const RowKey& b) {
    if (a.degree != b.degree) return a.degree < b.degree;
    if (a.component != b.component) return a.component < b.component;
    return GrlexLess{}(a.mono, b.mono);
  }
  friend bool operator==(const RowKey& a, const RowKey& b) {
    return a.degree == b.degree && a.component == b.component && a.mono == b.mono;
  }
};

/// A fully assembled exact linear system, rows in grading order. The same
/// assembly is used for solving and for independently replaying certificates.
struct GradedLinearSystem {
  std::vector<ColumnKey> columns;
  struct Equation {
    RowKey key;
    SparseVec lhs;
    Rational rhs;
  };
  std::vector<Equation> rows;
};

/// Finite witness that a decomposition has no solution at the recorded
/// grading level: an exact linear combination of assembled equations whose
/// unknown side cancels while the right-hand side does not.
struct ObstructionCertificate {
  enum class Kind { Relative, Invariant };
  Kind kind = Kind::Relative;
  int degree = 0;
  int t_order = -1;  // annotated by the normalization loop, -1 otherwise
  std::vector<std::pair<RowKey, Rational>> combination;
  Rational rhs;
  std::string human_note;
  // Inputs the failing system was assembled from, kept so the certificate
  // can be replayed against a fresh assembly.
  std::optional<PForm> context_form;
  std::optional<Jet> context_f;
};

/// eta = dh + a df, exact within the trusted degree, with the residual kept
/// as evidence (always the zero form on success).
struct RelativeDecomposition {
  Jet h;
  Jet a;
  PForm residual;
  int trusted_degree = 0;
};

/// omega = a df + f eta, exact within the trusted degree.
struct InvariantSplit {
  Jet a;
  PForm eta;
  PForm residual;
  int trusted_degree = 0;
};

/// f does not divide the stated component of omega ^ df.
struct NotInvariant {
  IndexTuple component;
  Jet offending;
};

struct ClosednessReport {
  bool closed = false;
  PForm residual;
};

namespace detail {

inline std::string mono_note(const Expo& e) {
  std::ostringstream os;
  bool any = false;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (any) os << "*";
    os << "x" << (i + 1);
    if (e[i] > 1) os << "^" << e[i];
    any = true;
  }
  return any ? os.str() : "1";
}

inline std::string row_note(const RowKey& k) {
  std::ostringstream os;
  os << "degree " << k.degree << ", component ";
  if (k.component.empty()) {
    os << "(scalar)";
  } else {
    for (std::size_t i = 0; i < k.component.size(); ++i) {
      if (i) os << "^";
      os << "dx" << (k.component[i] + 1);
    }
  }
  os << ", monomial " << mono_note(k.mono);
  return os.str();
}

/// Dense accumulation buffer for one equation, flattened to a sorted
/// SparseVec when emitted.
using RowBuilder = std::map<RowKey, std::pair<std::map<int, Rational>, Rational>>;

inline void add_lhs(RowBuilder& rows, const RowKey& key, int col, const Rational& v) {
  if (is_zero(v)) return;
  auto& cell = rows[key].first[col];
  cell += v;
  if (is_zero(cell)) rows[key].first.erase(col);
}

inline void add_rhs(RowBuilder& rows, const RowKey& key, const Rational& v) {
  if (is_zero(v)) return;
  auto& cell = rows[key].second;
  cell += v;
}

inline GradedLinearSystem finish(std::vector<ColumnKey> columns, RowBuilder rows) {
  GradedLinearSystem sys;
  sys.columns = std::move(columns);
  for (auto& [key, cell] : rows) {
    if (cell.first.empty() && is_zero(cell.second)) continue;
    GradedLinearSystem::Equation eq;
    eq.key = key;
    eq.lhs.assign(cell.first.begin(), cell.first.end());
    eq.rhs = cell.second;
    sys.rows.push_back(std::move(eq));
  }
  return sys;
}

struct SolveOutcome {
  bool consistent = true;
  std::vector<Rational> values;                       // when consistent
  std::vector<std::pair<RowKey, Rational>> combination;  // when inconsistent
  Rational rhs;
  int failed_degree = 0;
};

inline SolveOutcome run_solver(const GradedLinearSystem& sys) {
  ExactLinearSolver solver(static_cast<int>(sys.columns.size()));
  for (const auto& eq : sys.rows) {
    auto bad = solver.add_equation(eq.lhs, eq.rhs);
    if (bad) {
      SolveOutcome out;
      out.consistent = false;
      out.failed_degree = eq.key.degree;
      out.rhs = bad->rhs;
      for (const auto& [id, coeff] : bad->combination)
        out.combination.emplace_back(sys.rows[static_cast<std::size_t>(id)].key, coeff);
      return out;
    }
  }
  SolveOutcome out;
  out.values = solver.solution();
  return out;
}

inline ObstructionCertificate make_certificate(ObstructionCertificate::Kind kind,
                                               const SolveOutcome& bad) {
  ObstructionCertificate cert;
  cert.kind = kind;
  cert.degree = bad.failed_degree;
  cert.combination = bad.combination;
  cert.rhs = bad.rhs;
  std::ostringstream os;
  os << "combining " << bad.combination.size() << " assembled equation(s) up to "
     << row_note(bad.combination.back().first)
     << " cancels every unknown and leaves 0 = " << rational_string(bad.rhs);
  cert.human_note = os.str();
  return cert;
}

}  // namespace detail

/// Whether d(eta) ^ df vanishes within the trusted truncation: the fiberwise
/// closedness condition that gates the relative decomposition.
inline ClosednessReport check_relative_closedness(const PForm& eta, const Jet& f) {
  if (eta.form_degree() != 1) throw StructuralError("eta must be a 1-form");
  if (eta.dimension() != f.dimension()) throw StructuralError("dimension mismatch");
  PForm residual = wedge(exterior_d(eta), exterior_d(f));
  return ClosednessReport{residual.is_zero(), std::move(residual)};
}

/// System for the 2-form identity da ^ df = d(eta), the exact obstruction
/// side of eta = dh + a df: once a is known, eta - a df is closed and h is
/// produced by radial integration. Unknown columns are the monomials of a
/// (the constant is omitted; it never enters da), so the particular solution
/// with free columns zeroed is the minimal-support-of-a gauge.
inline GradedLinearSystem assemble_relative_system(const PForm& eta, const Jet& f) {
  const PForm df = exterior_d(f);
  const PForm deta = exterior_d(eta);
  const int trusted = std::min(eta.truncation_degree(), f.truncation_degree() - 1);
  const int window = trusted - 1;  // honest range of the differentiated identity
  const int dim = f.dimension();

  std::vector<ColumnKey> columns;
  std::map<Expo, int, GrlexLess> column_of;
  if (auto nu = df.order(); nu && window + 1 - *nu >= 1) {
    for (const auto& mono : monomials_up_to_degree(dim, window + 1 - *nu)) {
      if (total_degree(mono) == 0) continue;
      column_of.emplace(mono, static_cast<int>(columns.size()));
      columns.push_back(ColumnKey{"a", 0, mono});
    }
  }

  detail::RowBuilder rows;
  for (const auto& [beta, col] : column_of) {
    for (int p = 0; p < dim; ++p) {
      if (beta[p] == 0) continue;
      Expo dbeta = beta;
      dbeta[p] -= 1;
      for (int q = 0; q < dim; ++q) {
        if (q == p) continue;
        const Jet dfq = df.component({q});
        for (const auto& [gamma, c] : dfq.terms()) {
          Expo alpha = expo_sum(dbeta, gamma);
          if (total_degree(alpha) > window) continue;
          IndexTuple comp{std::min(p, q), std::max(p, q)};
          Rational v = c * beta[p];
          if (p > q) v = -v;
          detail::add_lhs(rows, RowKey{total_degree(alpha), comp, alpha}, col, v);
        }
      }
    }
  }
  for (const auto& [comp, jet] : deta.components())
    for (const auto& [alpha, c] : jet.terms())
      if (total_degree(alpha) <= window)
        detail::add_rhs(rows, RowKey{total_degree(alpha), comp, alpha}, c);

  return detail::finish(std::move(columns), std::move(rows));
}

inline std::variant<RelativeDecomposition, ObstructionCertificate> solve_relative(
    const PForm& eta, const Jet& f) {
  if (eta.form_degree() != 1) throw StructuralError("eta must be a 1-form");
  if (eta.dimension() != f.dimension()) throw StructuralError("dimension mismatch");
  if (std::min(eta.truncation_degree(), f.truncation_degree() - 1) < 1)
    throw StructuralError("truncation degree too small for a decomposition");

  const GradedLinearSystem sys = assemble_relative_system(eta, f);
  const auto outcome = detail::run_solver(sys);
  if (!outcome.consistent) {
    auto cert = detail::make_certificate(ObstructionCertificate::Kind::Relative, outcome);
    cert.context_form = eta;
    cert.context_f = f;
    return cert;
  }

  const int dim = f.dimension();
  const int trusted = std::min(eta.truncation_degree(), f.truncation_degree() - 1);
  Jet a = Jet::zero(dim, f.truncation_degree());
  for (std::size_t i = 0; i < sys.columns.size(); ++i)
    a.add_term(sys.columns[i].mono, outcome.values[i]);

  const PForm df = exterior_d(f);
  PForm beta = eta.truncated(trusted) - df.scaled_by(a).truncated(trusted);
  if (!exterior_d(beta).is_zero())
    throw InternalConsistencyError("solved a does not close eta - a df");
  Jet h = radial_integrate(beta);

  PForm recomposed = exterior_d(h) + df.scaled_by(a);
  PForm residual = eta.truncated(trusted) - recomposed.truncated(trusted);
  if (!residual.is_zero())
    throw InternalConsistencyError("relative decomposition residual is nonzero");
  return RelativeDecomposition{std::move(h), std::move(a), std::move(residual), trusted};
}

/// Exact division within the common truncation window: the unique q with
/// q * f = g modulo the window, if it exists.
inline std::optional<Jet> divide_exact(const Jet& g, const Jet& f) {
  if (g.dimension() != f.dimension()) throw StructuralError("dimension mismatch");
  if (f.is_zero()) throw StructuralError("division by the zero jet");
  if (g.is_zero()) return Jet::zero(g.dimension(), g.truncation_degree());
  const int window = std::min(g.truncation_degree(), f.truncation_degree());
  const int ordf = *f.order();
  if (window - ordf < 0) return std::nullopt;

  std::vector<Expo> monos = monomials_up_to_degree(g.dimension(), window - ordf);
  detail::RowBuilder rows;
  for (std::size_t col = 0; col < monos.size(); ++col)
    for (const auto& [gamma, c] : f.terms()) {
      Expo alpha = expo_sum(monos[col], gamma);
      if (total_degree(alpha) > window) continue;
      detail::add_lhs(rows, RowKey{total_degree(alpha), {}, alpha},
                      static_cast<int>(col), c);
    }
  for (const auto& [alpha, c] : g.terms())
    if (total_degree(alpha) <= window)
      detail::add_rhs(rows, RowKey{total_degree(alpha), {}, alpha}, c);

  std::vector<ColumnKey> columns;
  for (const auto& m : monos) columns.push_back(ColumnKey{"q", 0, m});
  const auto outcome = detail::run_solver(detail::finish(std::move(columns), std::move(rows)));
  if (!outcome.consistent) return std::nullopt;
  Jet q = Jet::zero(g.dimension(), g.truncation_degree());
  for (std::size_t i = 0; i < monos.size(); ++i) q.add_term(monos[i], outcome.values[i]);
  return q;
}

/// System for the componentwise identity omega_i = a d_i f + f e_i.
/// Columns put the eta unknowns first and the a unknowns last, so zeroing
/// free columns minimizes the support of a; a(0) itself is pinned by the
/// lowest-degree equations whenever the orders of omega and df agree.
inline GradedLinearSystem assemble_invariant_system(const PForm& omega, const Jet& f) {
  const PForm df = exterior_d(f);
  const int trusted = std::min(omega.truncation_degree(), f.truncation_degree() - 1);
  const int dim = f.dimension();
  const int ordf = f.order().value_or(trusted + 1);
  const int nudf = df.order().value_or(trusted + 1);

  std::vector<ColumnKey> columns;
  std::vector<std::vector<std::pair<Expo, int>>> eta_cols(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i)
    for (const auto& mono : monomials_up_to_degree(dim, trusted - ordf)) {
      eta_cols[static_cast<std::size_t>(i)].emplace_back(mono, static_cast<int>(columns.size()));
      columns.push_back(ColumnKey{"eta", i, mono});
    }
  std::vector<std::pair<Expo, int>> a_cols;
  for (const auto& mono : monomials_up_to_degree(dim, trusted - nudf)) {
    a_cols.emplace_back(mono, static_cast<int>(columns.size()));
    columns.push_back(ColumnKey{"a", 0, mono});
  }

  detail::RowBuilder rows;
  for (int i = 0; i < dim; ++i) {
    const Jet dfi = df.component({i});
    for (const auto& [beta, col] : a_cols)
      for (const auto& [gamma, c] : dfi.terms()) {
        Expo alpha = expo_sum(beta, gamma);
        if (total_degree(alpha) > trusted) continue;
        detail::add_lhs(rows, RowKey{total_degree(alpha), {i}, alpha}, col, c);
      }
    for (const auto& [beta, col] : eta_cols[static_cast<std::size_t>(i)])
      for (const auto& [gamma, c] : f.terms()) {
        Expo alpha = expo_sum(beta, gamma);
        if (total_degree(alpha) > trusted) continue;
        detail::add_lhs(rows, RowKey{total_degree(alpha), {i}, alpha}, col, c);
      }
    const Jet wi = omega.component({i});
    for (const auto& [alpha, c] : wi.terms())
      if (total_degree(alpha) <= trusted)
        detail::add_rhs(rows, RowKey{total_degree(alpha), {i}, alpha}, c);
  }
  return detail::finish(std::move(columns), std::move(rows));
}

inline std::variant<InvariantSplit, NotInvariant, ObstructionCertificate>
solve_invariant_split(const PForm& omega, const Jet& f) {
  if (omega.form_degree() != 1) throw StructuralError("omega must be a 1-form");
  if (omega.dimension() != f.dimension()) throw StructuralError("dimension mismatch");
  if (f.is_zero() || !is_zero(f.value_at_origin()))
    throw PreconditionError("f must be nonzero with f(0) = 0");

  // Invariance: f must divide every component of omega ^ df.
  const PForm theta = wedge(omega, exterior_d(f));
  for (const auto& [comp, jet] : theta.components())
    if (!divide_exact(jet, f)) return NotInvariant{comp, jet};

  const GradedLinearSystem sys = assemble_invariant_system(omega, f);
  const auto outcome = detail::run_solver(sys);
  if (!outcome.consistent) {
    auto cert = detail::make_certificate(ObstructionCertificate::Kind::Invariant, outcome);
    cert.context_form = omega;
    cert.context_f = f;
    return cert;
  }

  const int dim = f.dimension();
  const int trusted = std::min(omega.truncation_degree(), f.truncation_degree() - 1);
  Jet a = Jet::zero(dim, f.truncation_degree());
  PForm eta = PForm::zero(1, dim, f.truncation_degree());
  for (std::size_t i = 0; i < sys.columns.size(); ++i) {
    const auto& key = sys.columns[i];
    if (is_zero(outcome.values[i])) continue;
    if (key.block == "a") {
      a.add_term(key.mono, outcome.values[i]);
    } else {
      Jet j = eta.component({key.sub});
      j.add_term(key.mono, outcome.values[i]);
      eta.set_component({key.sub}, j);
    }
  }

  const PForm df = exterior_d(f);
  PForm recomposed = df.scaled_by(a) + eta.scaled_by(f);
  PForm residual = omega.truncated(trusted) - recomposed.truncated(trusted);
  if (!residual.is_zero())
    throw InternalConsistencyError("invariant split residual is nonzero");
  return InvariantSplit{std::move(a), std::move(eta), std::move(residual), trusted};
}

struct UnitClaimReport {
  bool a_is_unit = false;
  int nu_omega = 0;
  int nu_df = 0;
};

/// Reports the algebraic multiplicities of omega and df together with
/// whether the solved a is a unit, and enforces the implication
/// nu(omega) = nu(df)  =>  a is a unit  on the canonical-gauge solution.
inline UnitClaimReport unit_test_claim(const PForm& omega, const Jet& f) {
  auto split = solve_invariant_split(omega, f);
  auto* ok = std::get_if<InvariantSplit>(&split);
  if (!ok) throw PreconditionError("unit_test_claim requires a successful invariant split");
  auto nu_omega = omega.order();
  auto nu_df = exterior_d(f).order();
  if (!nu_omega || !nu_df)
    throw PreconditionError("unit_test_claim requires nonzero omega and df");
  UnitClaimReport report{ok->a.is_unit(), *nu_omega, *nu_df};
  if (report.nu_omega == report.nu_df && !report.a_is_unit)
    throw InternalConsistencyError("equal multiplicities but solved a is not a unit");
  return report;
}

/// Replays an obstruction certificate against a freshly assembled system:
/// the stored combination must cancel every unknown and reproduce the
/// nonzero right-hand side.
inline bool verify_obstruction(const ObstructionCertificate& cert,
                               const GradedLinearSystem& sys) {
  if (is_zero(cert.rhs)) return false;
  std::map<RowKey, std::pair<SparseVec, Rational>> by_key;
  for (const auto& eq : sys.rows) by_key.emplace(eq.key, std::make_pair(eq.lhs, eq.rhs));
  SparseVec acc;
  Rational rhs(0);
  for (const auto& [key, lambda] : cert.combination) {
    auto it = by_key.find(key);
    if (it == by_key.end()) return false;
    sparse::axpy(acc, lambda, it->second.first);
    rhs += lambda * it->second.second;
  }
  return acc.empty() && rhs == cert.rhs;
}

/// Replays a certificate against a system re-assembled from its own context.
inline bool verify_obstruction(const ObstructionCertificate& cert) {
  if (!cert.context_form || !cert.context_f) return false;
  const GradedLinearSystem sys =
      cert.kind == ObstructionCertificate::Kind::Relative
          ? assemble_relative_system(*cert.context_form, *cert.context_f)
          : assemble_invariant_system(*cert.context_form, *cert.context_f);
  return verify_obstruction(cert, sys);
}

}  // namespace germforge

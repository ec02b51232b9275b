#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "germforge/decompose.hpp"
#include "germforge/tform.hpp"

namespace germforge {

/// Integrable deformation of d(f0): omega_t = d(f0) + t omega_1 + ... The
/// t^0 coefficient is d(f0) by construction; integrability of the family is
/// a checked property (check_cascade), never an assumption.
struct DeformationFamily {
  Jet f0;
  std::vector<PForm> omegas;  // omega_1 .. omega_K

  int t_order() const { return static_cast<int>(omegas.size()); }

  int trusted_degree() const {
    int cap = f0.truncation_degree() - 1;
    for (const auto& w : omegas) cap = std::min(cap, w.truncation_degree());
    return cap;
  }

  TForm as_tform() const {
    const int cap = trusted_degree();
    TForm tf(1, f0.dimension(), cap, t_order());
    tf.set_coefficient(0, exterior_d(f0).truncated(cap));
    for (int j = 1; j <= t_order(); ++j)
      tf.set_coefficient(j, omegas[static_cast<std::size_t>(j - 1)].truncated(cap));
    return tf;
  }
};

/// Per-order report of the integrability cascade: the t^s coefficient of
/// omega_t ^ d(omega_t) for each s up to the family's t-order.
struct CascadeReport {
  struct Order {
    int t_order = 0;
    bool passed = false;
    PForm residual;
  };
  std::vector<Order> orders;
  std::optional<int> first_failure;

  bool passed() const { return !first_failure.has_value(); }
};

inline CascadeReport check_cascade(const TForm& family) {
  if (family.form_degree() != 1)
    throw StructuralError("cascade check expects a family of 1-forms");
  TForm residual = wedge(family, exterior_d(family));
  CascadeReport report;
  for (int s = 0; s <= residual.t_order(); ++s) {
    const PForm& r = residual.coefficient(s);
    report.orders.push_back({s, r.is_zero(), r});
    if (!r.is_zero() && !report.first_failure) report.first_failure = s;
  }
  return report;
}

inline CascadeReport check_cascade(const DeformationFamily& fam) {
  return check_cascade(fam.as_tform());
}

struct NormalizationStep {
  int t_order = 0;
  PForm rho;  // the coefficient the stage decomposed (after earlier divisions)
  Jet f_j;
  Jet a_j;
};

struct NormalizationResult {
  TPoly G;      // unit t-series with omega_t = G d_x F within trust
  TPoly F;      // first integral; t^0 coefficient is f0
  TPoly h_hat;  // G * dF/dt, the dt-component of the graph extension
  std::vector<NormalizationStep> steps;
  TForm certificate_residual;  // omega_t ^ d_x F, identically zero
  int trusted_degree = 0;
};

/// The inductive normalization: at stage j, decompose the t^j coefficient of
/// the already-divided family as rho_j = d f_j + a_j d f0, divide the family
/// by the unit 1 + t^j a_j, and accumulate G and F. Orders below j are
/// untouched by the division, so one pass over j = 1..K suffices.
inline std::variant<NormalizationResult, ObstructionCertificate> normalize(
    const DeformationFamily& fam) {
  const CascadeReport cascade = check_cascade(fam);
  if (!cascade.passed())
    throw PreconditionError("family fails the integrability cascade at t-order " +
                            std::to_string(*cascade.first_failure));

  const int dim = fam.f0.dimension();
  const int cap = fam.f0.truncation_degree();
  const int K = fam.t_order();
  const TForm original = fam.as_tform();
  const PForm df0 = exterior_d(fam.f0);

  TForm W = original;
  TPoly G = TPoly::one(dim, cap, K);
  TPoly F = TPoly::from_jet(fam.f0, K);
  std::vector<NormalizationStep> steps;

  for (int j = 1; j <= K; ++j) {
    PForm rho = W.coefficient(j);
    if (!wedge(exterior_d(rho), df0).is_zero())
      throw InternalConsistencyError(
          "transformed coefficient not closed relative to f0 at t-order " +
          std::to_string(j));
    auto solved = solve_relative(rho, fam.f0);
    if (auto* cert = std::get_if<ObstructionCertificate>(&solved)) {
      cert->t_order = j;
      return std::move(*cert);
    }
    auto& dec = std::get<RelativeDecomposition>(solved);
    F.set_coefficient(j, dec.h);
    TPoly unit = TPoly::one(dim, cap, K);
    unit.set_coefficient(j, unit.coefficient(j) + dec.a);
    W = scale_by_tpoly(W, invert_unit(unit));
    G = G * unit;
    steps.push_back(NormalizationStep{j, std::move(rho), dec.h, dec.a});
  }

  // The divided family must now be exact order by order.
  for (int j = 0; j <= K; ++j) {
    PForm diff = W.coefficient(j) - exterior_d(F.coefficient(j));
    if (!diff.is_zero())
      throw InternalConsistencyError("divided family is not exact at t-order " +
                                     std::to_string(j));
  }

  TForm dF = exterior_d_x(F);
  TForm wedge_residual = wedge(original, dF);
  TForm recompose_residual = original - scale_by_tpoly(dF, G);
  if (!wedge_residual.is_zero() || !recompose_residual.is_zero())
    throw InternalConsistencyError("normalization certificate is nonzero");

  TPoly h_hat = G * F.derivative_t();
  const int trusted = wedge_residual.truncation_degree();
  return NormalizationResult{std::move(G),     std::move(F),
                             std::move(h_hat), std::move(steps),
                             std::move(wedge_residual), trusted};
}

/// A family as handed in by a user, before the t^0 coefficient has been
/// reduced to an exact differential.
struct PreparedFamily {
  DeformationFamily fam;
  Jet base_unit;  // the original family equals base_unit * (d f0 + ...)
};

struct FamilyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Solves omega0 = u * d(f0) for the unit jet u, exactly within the window.
inline std::optional<Jet> solve_base_unit(const PForm& omega0, const Jet& f0) {
  const PForm df0 = exterior_d(f0);
  const int window = std::min(omega0.truncation_degree(), f0.truncation_degree() - 1);
  auto nu = df0.order();
  if (!nu) return std::nullopt;
  std::vector<Expo> monos = monomials_up_to_degree(f0.dimension(), window - *nu);
  RowBuilder rows;
  for (std::size_t col = 0; col < monos.size(); ++col)
    for (int i = 0; i < f0.dimension(); ++i) {
      const Jet dfi = df0.component({i});
      for (const auto& [gamma, c] : dfi.terms()) {
        Expo alpha = expo_sum(monos[col], gamma);
        if (total_degree(alpha) > window) continue;
        add_lhs(rows, RowKey{total_degree(alpha), {i}, alpha},
                static_cast<int>(col), c);
      }
    }
  for (const auto& [comp, jet] : omega0.components())
    for (const auto& [alpha, c] : jet.terms())
      if (total_degree(alpha) <= window)
        add_rhs(rows, RowKey{total_degree(alpha), comp, alpha}, c);
  std::vector<ColumnKey> columns;
  for (const auto& m : monos) columns.push_back(ColumnKey{"u", 0, m});
  const auto outcome = run_solver(finish(std::move(columns), std::move(rows)));
  if (!outcome.consistent) return std::nullopt;
  Jet u = Jet::zero(f0.dimension(), f0.truncation_degree());
  for (std::size_t i = 0; i < monos.size(); ++i) u.add_term(monos[i], outcome.values[i]);
  return u;
}

}  // namespace detail

/// Turns a raw t-series of 1-forms into a canonical deformation family.
/// With a base hint f0, the t^0 coefficient may be any unit multiple of
/// d(f0); the unit is solved for exactly and divided out. Without a hint the
/// t^0 coefficient must be closed, and f0 is produced by radial integration.
inline PreparedFamily prepare_family(const TForm& W, std::optional<Jet> f0_hint) {
  if (W.form_degree() != 1) throw StructuralError("a family must consist of 1-forms");
  const PForm omega0 = W.coefficient(0);
  Jet f0 = f0_hint ? *f0_hint : Jet::zero(W.dimension(), W.truncation_degree() + 1);
  Jet unit = Jet::constant(W.dimension(), f0.truncation_degree(), Rational(1));
  if (f0_hint) {
    auto u = detail::solve_base_unit(omega0, f0);
    if (!u || !u->is_unit())
      throw FamilyError("t^0 coefficient is not a unit multiple of d(f0)");
    unit = *u;
  } else {
    if (!exterior_d(omega0).is_zero())
      throw FamilyError("t^0 coefficient is not closed; pass f0 explicitly");
    f0 = radial_integrate(omega0);
  }

  TForm divided = scale_by_tpoly(W, TPoly::from_jet(invert_unit(unit), W.t_order()));
  PForm check = divided.coefficient(0) - exterior_d(f0).truncated(divided.truncation_degree());
  if (!check.is_zero())
    throw InternalConsistencyError("base unit division did not normalize t^0");

  DeformationFamily fam{std::move(f0), {}};
  for (int j = 1; j <= divided.t_order(); ++j) fam.omegas.push_back(divided.coefficient(j));
  return PreparedFamily{std::move(fam), std::move(unit)};
}

/// End-to-end driver: prepare, normalize, then fold the base unit back into
/// G and re-certify against the original series.
inline std::variant<NormalizationResult, ObstructionCertificate> normalize_family(
    const TForm& W, std::optional<Jet> f0_hint) {
  PreparedFamily prep = prepare_family(W, f0_hint);
  auto res = normalize(prep.fam);
  if (std::holds_alternative<ObstructionCertificate>(res)) return res;
  auto& ok = std::get<NormalizationResult>(res);
  ok.G = TPoly::from_jet(prep.base_unit, ok.G.t_order()) * ok.G;
  ok.h_hat = ok.G * ok.F.derivative_t();
  TForm dF = exterior_d_x(ok.F);
  TForm wedge_residual = wedge(W, dF);
  TForm recompose_residual = W - scale_by_tpoly(dF, ok.G);
  if (!wedge_residual.is_zero() || !recompose_residual.is_zero())
    throw InternalConsistencyError("normalization certificate is nonzero");
  ok.trusted_degree = wedge_residual.truncation_degree();
  ok.certificate_residual = std::move(wedge_residual);
  return res;
}

struct FirstIntegralCheck {
  bool valid = false;
  TForm residual;
  std::optional<int> first_bad_order;
};

/// Independent verifier: omega_t ^ d_x F per t-order within the trusted
/// truncation. Usable on any candidate F, not only normalize output.
inline FirstIntegralCheck certify_first_integral(const TForm& W, const TPoly& F) {
  TForm residual = wedge(W, exterior_d_x(F));
  std::optional<int> first_bad;
  for (int j = 0; j <= residual.t_order(); ++j)
    if (!residual.coefficient(j).is_zero()) {
      first_bad = j;
      break;
    }
  return FirstIntegralCheck{!first_bad.has_value(), std::move(residual), first_bad};
}

inline FirstIntegralCheck certify_first_integral(const DeformationFamily& fam,
                                                 const TPoly& F) {
  return certify_first_integral(fam.as_tform(), F);
}

}  // namespace germforge

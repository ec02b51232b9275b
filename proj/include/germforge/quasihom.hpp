#pragma once

#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "germforge/normalize.hpp"

namespace germforge {

struct QuasiHomogeneityReport {
  bool is_qh = false;
  std::optional<WeightVector> weights;
  bool strict = false;
};

/// Exhaustive bounded search for positive integer weights putting every
/// monomial of f on one weighted level. Weight vectors are scanned in
/// ascending lexicographic order, so the reported vector is the smallest
/// one that works; the search is exact and deterministic.
inline QuasiHomogeneityReport detect_quasihomogeneity(const Jet& f, int max_weight) {
  if (max_weight < 1) throw StructuralError("max_weight must be positive");
  QuasiHomogeneityReport report;
  if (f.is_zero()) return report;
  const int dim = f.dimension();
  std::vector<int> w(static_cast<std::size_t>(dim), 1);
  for (;;) {
    WeightVector wv{0, w};
    auto it = f.terms().begin();
    wv.d = weighted_degree(wv, it->first);
    bool ok = true;
    for (++it; it != f.terms().end(); ++it)
      if (weighted_degree(wv, it->first) != wv.d) {
        ok = false;
        break;
      }
    if (ok) {
      report.is_qh = true;
      report.strict = wv.strict();
      report.weights = std::move(wv);
      return report;
    }
    int pos = dim - 1;
    while (pos >= 0 && w[static_cast<std::size_t>(pos)] == max_weight) {
      w[static_cast<std::size_t>(pos)] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++w[static_cast<std::size_t>(pos)];
  }
  return report;
}

/// The quasi-homogeneous embedding of omega = df + f eta into a deformation
/// of d(f), together with the split data it was built from.
struct EmbedOutcome {
  DeformationFamily family;
  InvariantSplit split;
  Jet absorbed_unit;  // the a that was divided out (identically 1 when a = 1)
  PForm eta_hat;      // omega / a = df + f eta_hat
};

/// Embeds omega as the family d(f) + sum_m t^m (f * eta_hat_m), where
/// eta_hat_m collects the weighted-degree-m part of eta_hat under the
/// pullback x_i -> t^{w_i} x_i. Because all weights are positive the t^0
/// part of the pullback is empty and the family starts at d(f); evaluating
/// at t = 1 returns omega / a exactly. A non-negative t_order extends the
/// family with zero coefficients beyond its natural range.
inline std::variant<EmbedOutcome, NotInvariant, ObstructionCertificate>
embed_as_deformation(const PForm& omega, const Jet& f, const WeightVector& w,
                     int t_order = -1) {
  if (static_cast<int>(w.weights.size()) != f.dimension())
    throw StructuralError("weight vector dimension mismatch");
  if (!w.strict()) throw PreconditionError("weights must be strictly positive");
  for (const auto& [e, c] : f.terms())
    if (weighted_degree(w, e) != w.d)
      throw PreconditionError("f is not quasi-homogeneous for the given weights");

  auto split = solve_invariant_split(omega, f);
  if (auto* ni = std::get_if<NotInvariant>(&split)) return std::move(*ni);
  if (auto* cert = std::get_if<ObstructionCertificate>(&split)) return std::move(*cert);
  auto& ok = std::get<InvariantSplit>(split);
  if (!ok.a.is_unit())
    throw PreconditionError("solved a is not a unit; omega is not a deformation of d(f)");

  Jet a_inv = invert_unit(ok.a);
  PForm eta_hat = ok.eta.scaled_by(a_inv);
  TForm pulled = pullback_weighted(eta_hat, w);
  if (!pulled.coefficient(0).is_zero())
    throw InternalConsistencyError("positive weights left a t^0 pullback term");

  const int natural = pulled.t_order();
  const int K = t_order < 0 ? natural : t_order;
  DeformationFamily fam{f, {}};
  for (int m = 1; m <= K; ++m) {
    if (m <= natural)
      fam.omegas.push_back(pulled.coefficient(m).scaled_by(f));
    else
      fam.omegas.push_back(PForm::zero(1, f.dimension(), f.truncation_degree()));
  }
  Jet absorbed = ok.a;
  return EmbedOutcome{std::move(fam), std::move(ok), std::move(absorbed), std::move(eta_hat)};
}

/// One expression of a degree-k monomial inside the truncated Jacobian ideal.
struct ContainmentWitness {
  Expo monomial;
  std::vector<Jet> multipliers;  // one per variable: sum_i c_i d_i f = monomial
};

struct SingularityReport {
  bool isolated_certified = false;
  std::optional<int> k_found;
  std::vector<Jet> jacobian_generators;
  std::vector<ContainmentWitness> witnesses;
  int window = 0;  // containments hold modulo total degree > window
};

/// Certifies an isolated singularity by exhibiting, for some k, every
/// degree-k monomial inside the ideal of the partial derivatives modulo
/// high-order terms. Containment modulo degree window+1 with window >= k
/// forces genuine containment of the k-th power of the maximal ideal, so a
/// success is a certificate; failure for every k up to the window is only
/// inconclusive.
inline SingularityReport certify_isolated_singularity(const Jet& f) {
  if (!is_zero(f.value_at_origin()))
    throw PreconditionError("isolated-singularity test requires f(0) = 0");
  const int dim = f.dimension();
  const int window = f.truncation_degree() - 1;

  SingularityReport report;
  report.window = window;
  for (int i = 0; i < dim; ++i) report.jacobian_generators.push_back(f.derivative(i));

  // Index monomials up to the window so coefficient vectors are sparse ints.
  std::map<Expo, int, GrlexLess> index_of;
  for (const auto& m : monomials_up_to_degree(dim, window))
    index_of.emplace(m, static_cast<int>(index_of.size()));

  auto vector_of = [&](const Jet& j) {
    std::map<int, Rational> cells;
    for (const auto& [e, c] : j.terms())
      if (total_degree(e) <= window) cells[index_of.at(e)] = c;
    return SparseVec(cells.begin(), cells.end());
  };

  SpanBasis basis;
  struct Generator {
    int var;
    Expo mono;
  };
  std::vector<Generator> generators;
  for (int i = 0; i < dim; ++i) {
    const Jet& dfi = report.jacobian_generators[static_cast<std::size_t>(i)];
    if (dfi.is_zero()) continue;
    const int bound = window - *dfi.order();
    for (const auto& m : monomials_up_to_degree(dim, bound)) {
      Jet gen = Jet::monomial(dim, window, m) * dfi.truncated(window);
      basis.insert(vector_of(gen));
      generators.push_back(Generator{i, m});
    }
  }

  for (int k = 1; k <= window; ++k) {
    std::vector<ContainmentWitness> level;
    bool all = true;
    for (const auto& alpha : monomials_of_degree(dim, k)) {
      auto combo = basis.express(vector_of(Jet::monomial(dim, window, alpha)));
      if (!combo) {
        all = false;
        break;
      }
      ContainmentWitness wit;
      wit.monomial = alpha;
      wit.multipliers.assign(static_cast<std::size_t>(dim),
                             Jet::zero(dim, f.truncation_degree()));
      for (const auto& [id, c] : *combo) {
        const auto& g = generators[static_cast<std::size_t>(id)];
        wit.multipliers[static_cast<std::size_t>(g.var)].add_term(g.mono, c);
      }
      level.push_back(std::move(wit));
    }
    if (all) {
      report.isolated_certified = true;
      report.k_found = k;
      report.witnesses = std::move(level);
      return report;
    }
  }
  return report;
}

/// Re-multiplies every stored witness and compares with the claimed monomial
/// modulo the report's window.
inline bool verify_witnesses(const SingularityReport& report, const Jet& f) {
  for (const auto& wit : report.witnesses) {
    Jet acc = Jet::zero(f.dimension(), report.window);
    for (int i = 0; i < f.dimension(); ++i)
      acc = acc + jet_mul(wit.multipliers[static_cast<std::size_t>(i)],
                          f.derivative(i)).truncated(report.window);
    if (!(acc == Jet::monomial(f.dimension(), report.window, wit.monomial)))
      return false;
  }
  return true;
}

enum class IsolatedStatus { Certified, Unknown };

struct Theorem3Report {
  bool first_integral_expected = false;
  int nu_omega = 0;
  int nu_df = 0;
  IsolatedStatus isolated = IsolatedStatus::Unknown;
  std::optional<int> k_found;
  bool split_ok = false;
  bool a_is_unit = false;
};

/// The multiplicity criterion: a first integral is expected exactly when the
/// singularity certificate succeeds and nu(omega) = nu(df). This is a
/// verdict about expectation; the construction itself is normalize after
/// embed_as_deformation.
inline std::variant<Theorem3Report, NotInvariant> theorem3_criterion(const PForm& omega,
                                                                     const Jet& f) {
  auto nu_omega = omega.order();
  auto nu_df = exterior_d(f).order();
  if (!nu_omega || !nu_df)
    throw PreconditionError("theorem3 criterion requires nonzero omega and df");

  Theorem3Report report;
  report.nu_omega = *nu_omega;
  report.nu_df = *nu_df;

  SingularityReport sing = certify_isolated_singularity(f);
  report.isolated = sing.isolated_certified ? IsolatedStatus::Certified
                                            : IsolatedStatus::Unknown;
  report.k_found = sing.k_found;

  auto split = solve_invariant_split(omega, f);
  if (auto* ni = std::get_if<NotInvariant>(&split)) return std::move(*ni);
  if (auto* ok = std::get_if<InvariantSplit>(&split)) {
    report.split_ok = true;
    report.a_is_unit = ok->a.is_unit();
  }

  report.first_integral_expected =
      report.isolated == IsolatedStatus::Certified && report.nu_omega == report.nu_df;
  return report;
}

struct EmbeddedIntegralCheck {
  int checked_degree = 0;
  bool valid = false;
  PForm residual;
};

/// Evaluates omega ^ d_x F at t = 1 for an F produced by normalizing a
/// weighted embedding. The t-grading of such a family equals the weighted
/// grading, so the coefficients truncated away beyond t-order K only carry
/// terms of total degree at least ceil((d + K + 1) / max weight); below that
/// threshold (shifted by the order of omega and the derivative) the residual
/// must vanish exactly.
inline EmbeddedIntegralCheck check_embedded_first_integral(const PForm& omega,
                                                           const TPoly& F,
                                                           const WeightVector& w) {
  Jet f_eval = F.coefficient(0);
  for (int j = 1; j <= F.t_order(); ++j) f_eval = f_eval + F.coefficient(j);
  PForm residual = wedge(omega, exterior_d(f_eval));

  const int max_w = *std::max_element(w.weights.begin(), w.weights.end());
  const int omitted_level = w.d + F.t_order() + 1;
  const int omitted_degree = (omitted_level + max_w - 1) / max_w;  // ceil
  const int nu = omega.order().value_or(1);
  int bound = omitted_degree - 1 + nu - 1;
  bound = std::min(bound, residual.truncation_degree());

  const bool valid = residual.truncated(bound).is_zero();
  return EmbeddedIntegralCheck{bound, valid, std::move(residual)};
}

struct CurveCheck {
  bool in_zero_set = false;
  std::optional<int> f_pullback_order;
  bool contradiction = false;
};

/// Substitutes a candidate curve (with gamma(0) = 0) into omega = df + f eta.
/// If the curve annihilates every component of omega while f pulls back to a
/// finite positive order p, the pullback identity p t^{p-1} + t^p (...) = 0
/// is impossible; the check reports that contradiction.
inline CurveCheck curve_substitution_check(const Jet& f, const PForm& eta,
                                           const std::vector<Jet>& curve) {
  const int dim = f.dimension();
  if (static_cast<int>(curve.size()) != dim)
    throw StructuralError("curve has wrong number of components");
  for (const auto& g : curve)
    if (!is_zero(g.value_at_origin()))
      throw PreconditionError("curve must pass through the origin");

  const PForm df = exterior_d(f);
  PForm omega = df + eta.scaled_by(f);

  CurveCheck check;
  check.in_zero_set = true;
  for (int i = 0; i < dim; ++i)
    if (!compose_curve(omega.component({i}), curve).is_zero()) {
      check.in_zero_set = false;
      break;
    }

  Jet f_pulled = compose_curve(f, curve);
  check.f_pullback_order = f_pulled.order();
  if (!check.in_zero_set || !check.f_pullback_order || *check.f_pullback_order < 1)
    return check;

  // gamma^*(omega) = d/ds (f o gamma) + (f o gamma) * sum_i (eta_i o gamma) gamma_i'
  Jet pullback = f_pulled.derivative(0);
  for (int i = 0; i < dim; ++i) {
    Jet term = jet_mul(compose_curve(eta.component({i}), curve),
                       curve[static_cast<std::size_t>(i)].derivative(0));
    pullback = pullback + jet_mul(f_pulled, term).truncated(pullback.truncation_degree());
  }
  // Vanishing components force gamma^*(omega) = 0, yet its lowest term is
  // p s^{p-1}. Both cannot hold.
  check.contradiction = pullback.order() == std::optional<int>(*check.f_pullback_order - 1);
  return check;
}

}  // namespace germforge

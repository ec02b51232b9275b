#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "germforge/dsl.hpp"
#include "germforge/format.hpp"
#include "germforge/normalize.hpp"
#include "germforge/quasihom.hpp"

namespace germforge {

using Json = nlohmann::ordered_json;

struct RunOptions {
  std::optional<int> degree;
  std::optional<int> torder;
  bool verbose = false;
};

/// Exit codes: 0 success, 1 usage or internal error, 2 a mathematically
/// meaningful negative (obstruction, non-invariance, failed check),
/// 3 inconclusive at the working truncation.
struct TaskOutcome {
  int exit_code = 1;
  std::string status = "FAIL";
  Json certificate;
  std::string human_text;
};

namespace runner {

inline int exit_code_for(const std::string& status) {
  if (status == "SUCCESS") return 0;
  if (status == "INCONCLUSIVE") return 3;
  if (status == "OBSTRUCTION" || status == "NOT_INVARIANT" || status == "FAIL") return 2;
  return 1;
}

struct TaskContext {
  const ElaboratedProblem& prob;
  const std::vector<std::string>& names;
  bool verbose;
  Json payload = Json::object();
  std::ostringstream text;
};

struct TaskError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const TForm& arg_at(const ElaboratedProblem& p, std::size_t i,
                           const std::string& what) {
  if (i >= p.task_args.size())
    throw TaskError("task '" + p.task_name + "' is missing argument " +
                    std::to_string(i + 1) + " (" + what + ")");
  return p.task_args[i];
}

inline Jet need_jet(const ElaboratedProblem& p, std::size_t i, const std::string& what) {
  const TForm& v = arg_at(p, i, what);
  if (v.form_degree() != 0) throw TaskError(what + " must be a scalar");
  for (int j = 1; j <= v.t_order(); ++j)
    if (!v.coefficient(j).is_zero()) throw TaskError(what + " must not involve t");
  return v.coefficient(0).as_jet();
}

inline TPoly need_tpoly(const ElaboratedProblem& p, std::size_t i, const std::string& what) {
  const TForm& v = arg_at(p, i, what);
  if (v.form_degree() != 0) throw TaskError(what + " must be a scalar");
  return v.as_tpoly();
}

inline PForm need_form(const ElaboratedProblem& p, std::size_t i, const std::string& what) {
  const TForm& v = arg_at(p, i, what);
  if (v.form_degree() != 1) throw TaskError(what + " must be a 1-form");
  for (int j = 1; j <= v.t_order(); ++j)
    if (!v.coefficient(j).is_zero()) throw TaskError(what + " must not involve t");
  return v.coefficient(0);
}

inline TForm need_family(const ElaboratedProblem& p, std::size_t i, const std::string& what) {
  const TForm& v = arg_at(p, i, what);
  if (v.form_degree() != 1) throw TaskError(what + " must be a family of 1-forms");
  return v;
}

inline bool is_t_free(const TForm& v) {
  for (int j = 1; j <= v.t_order(); ++j)
    if (!v.coefficient(j).is_zero()) return false;
  return true;
}

inline Json obstruction_json(const ObstructionCertificate& cert,
                             const std::vector<std::string>& names) {
  Json j;
  j["system"] = cert.kind == ObstructionCertificate::Kind::Relative ? "relative" : "invariant";
  j["degree"] = cert.degree;
  if (cert.t_order >= 0) j["t_order"] = cert.t_order;
  j["lhs_reduces_to"] = "0";
  j["rhs"] = rational_string(cert.rhs);
  Json combo = Json::array();
  for (const auto& [key, coeff] : cert.combination) {
    Json row;
    row["equation"] = row_key_string(key, names);
    row["coefficient"] = rational_string(coeff);
    combo.push_back(std::move(row));
  }
  j["combination"] = std::move(combo);
  j["replayed"] = verify_obstruction(cert);
  j["note"] = cert.human_note;
  return j;
}

inline Json cascade_json(const CascadeReport& report, const std::vector<std::string>& names,
                         bool verbose) {
  Json orders = Json::array();
  for (const auto& o : report.orders) {
    Json entry;
    entry["t_order"] = o.t_order;
    entry["passed"] = o.passed;
    if (!o.passed || verbose) entry["residual"] = pform_string(o.residual, names);
    orders.push_back(std::move(entry));
  }
  Json j;
  j["orders"] = std::move(orders);
  if (report.first_failure)
    j["first_failure"] = *report.first_failure;
  else
    j["first_failure"] = nullptr;
  return j;
}

// --- task handlers --------------------------------------------------------

inline std::string task_check_integrability(TaskContext& ctx) {
  const TForm& arg = arg_at(ctx.prob, 0, "a 1-form or family");
  if (arg.form_degree() != 1) throw TaskError("check-integrability expects a 1-form");
  if (is_t_free(arg)) {
    PForm omega = arg.coefficient(0);
    PForm residual = integrability_residual(omega);
    ctx.payload["integrable"] = residual.is_zero();
    ctx.payload["residual"] = pform_string(residual, ctx.names);
    ctx.payload["trusted_degree"] = residual.truncation_degree();
    ctx.text << "omega ^ d(omega) = " << pform_string(residual, ctx.names) << "\n";
    return residual.is_zero() ? "SUCCESS" : "FAIL";
  }
  CascadeReport report = check_cascade(arg);
  ctx.payload["cascade"] = cascade_json(report, ctx.names, ctx.verbose);
  if (report.first_failure)
    ctx.text << "cascade fails at t-order " << *report.first_failure << "\n";
  else
    ctx.text << "cascade passes through t-order " << arg.t_order() << "\n";
  return report.passed() ? "SUCCESS" : "FAIL";
}

inline std::string task_decompose_relative(TaskContext& ctx) {
  PForm eta = need_form(ctx.prob, 0, "eta");
  Jet f = need_jet(ctx.prob, 1, "f");
  ClosednessReport closed = check_relative_closedness(eta, f);
  ctx.payload["relatively_closed"] = closed.closed;
  if (!closed.closed)
    ctx.payload["closedness_residual"] = pform_string(closed.residual, ctx.names);
  auto result = solve_relative(eta, f);
  if (auto* cert = std::get_if<ObstructionCertificate>(&result)) {
    ctx.payload["obstruction"] = obstruction_json(*cert, ctx.names);
    ctx.text << "no decomposition: " << cert->human_note << "\n";
    return "OBSTRUCTION";
  }
  const auto& dec = std::get<RelativeDecomposition>(result);
  ctx.payload["h"] = jet_string(dec.h, ctx.names);
  ctx.payload["a"] = jet_string(dec.a, ctx.names);
  ctx.payload["residual"] = pform_string(dec.residual, ctx.names);
  ctx.payload["trusted_degree"] = dec.trusted_degree;
  ctx.text << "eta = d(h) + a*d(f) with\n  h = " << jet_string(dec.h, ctx.names)
           << "\n  a = " << jet_string(dec.a, ctx.names) << "\n";
  return "SUCCESS";
}

inline std::string task_decompose_invariant(TaskContext& ctx) {
  PForm omega = need_form(ctx.prob, 0, "omega");
  Jet f = need_jet(ctx.prob, 1, "f");
  auto result = solve_invariant_split(omega, f);
  if (auto* ni = std::get_if<NotInvariant>(&result)) {
    ctx.payload["component"] = tuple_string(ni->component, ctx.names);
    ctx.payload["offending"] = jet_string(ni->offending, ctx.names);
    ctx.text << "(f = 0) is not invariant: f does not divide the "
             << tuple_string(ni->component, ctx.names) << " component of omega ^ d(f)\n";
    return "NOT_INVARIANT";
  }
  if (auto* cert = std::get_if<ObstructionCertificate>(&result)) {
    ctx.payload["obstruction"] = obstruction_json(*cert, ctx.names);
    ctx.text << "no split: " << cert->human_note << "\n";
    return "OBSTRUCTION";
  }
  const auto& dec = std::get<InvariantSplit>(result);
  ctx.payload["a"] = jet_string(dec.a, ctx.names);
  ctx.payload["eta"] = pform_string(dec.eta, ctx.names);
  ctx.payload["residual"] = pform_string(dec.residual, ctx.names);
  ctx.payload["trusted_degree"] = dec.trusted_degree;
  ctx.payload["a_is_unit"] = dec.a.is_unit();
  auto nu_omega = omega.order();
  auto nu_df = exterior_d(f).order();
  if (nu_omega) ctx.payload["nu_omega"] = *nu_omega;
  if (nu_df) ctx.payload["nu_df"] = *nu_df;
  ctx.text << "omega = a*d(f) + f*eta with\n  a = " << jet_string(dec.a, ctx.names)
           << "\n  eta = " << pform_string(dec.eta, ctx.names) << "\n";
  return "SUCCESS";
}

inline Json steps_json(const std::vector<NormalizationStep>& steps,
                       const std::vector<std::string>& names, bool verbose) {
  Json arr = Json::array();
  for (const auto& s : steps) {
    Json e;
    e["t_order"] = s.t_order;
    e["f_j"] = jet_string(s.f_j, names);
    e["a_j"] = jet_string(s.a_j, names);
    if (verbose) e["rho"] = pform_string(s.rho, names);
    arr.push_back(std::move(e));
  }
  return arr;
}

inline std::string task_normalize(TaskContext& ctx) {
  TForm family = need_family(ctx.prob, 0, "a deformation family");
  std::optional<Jet> f0;
  if (ctx.prob.task_args.size() > 1) f0 = need_jet(ctx.prob, 1, "f0");

  CascadeReport cascade = check_cascade(family);
  if (!cascade.passed()) {
    ctx.payload["cascade"] = cascade_json(cascade, ctx.names, ctx.verbose);
    ctx.text << "family is not integrable: cascade fails at t-order "
             << *cascade.first_failure << "\n";
    return "FAIL";
  }

  std::variant<NormalizationResult, ObstructionCertificate> result =
      [&]() -> std::variant<NormalizationResult, ObstructionCertificate> {
    try {
      return normalize_family(family, f0);
    } catch (const FamilyError& err) {
      throw TaskError(err.what());
    }
  }();

  if (auto* cert = std::get_if<ObstructionCertificate>(&result)) {
    ctx.payload["obstruction"] = obstruction_json(*cert, ctx.names);
    ctx.text << "no formal first integral at this truncation: obstruction at t-order "
             << cert->t_order << ", degree " << cert->degree << "\n";
    return "OBSTRUCTION";
  }
  const auto& ok = std::get<NormalizationResult>(result);
  ctx.payload["F"] = tpoly_string(ok.F, ctx.names);
  ctx.payload["G"] = tpoly_string(ok.G, ctx.names);
  ctx.payload["h_hat"] = tpoly_string(ok.h_hat, ctx.names);
  ctx.payload["steps"] = steps_json(ok.steps, ctx.names, ctx.verbose);
  ctx.payload["residual"] = tform_string(ok.certificate_residual, ctx.names);
  ctx.payload["trusted_degree"] = ok.trusted_degree;
  ctx.text << "omega_t = G * d_x F with\n  F = " << tpoly_string(ok.F, ctx.names)
           << "\n  G = " << tpoly_string(ok.G, ctx.names) << "\n";
  return "SUCCESS";
}

inline std::string task_certify(TaskContext& ctx) {
  TForm family = need_family(ctx.prob, 0, "a deformation family");
  TPoly F = need_tpoly(ctx.prob, 1, "F");
  FirstIntegralCheck check = certify_first_integral(family, F);
  ctx.payload["valid"] = check.valid;
  if (check.first_bad_order) {
    ctx.payload["first_bad_order"] = *check.first_bad_order;
    ctx.payload["residual_at_bad_order"] =
        pform_string(check.residual.coefficient(*check.first_bad_order), ctx.names);
  }
  ctx.payload["trusted_degree"] = check.residual.truncation_degree();
  ctx.text << (check.valid ? "F is a first integral of the family (within trust)\n"
                           : "F is not a first integral of the family\n");
  return check.valid ? "SUCCESS" : "FAIL";
}

inline Json weights_json(const WeightVector& w) {
  Json j;
  j["d"] = w.d;
  j["weights"] = w.weights;
  return j;
}

inline std::string task_analyze_singularity(TaskContext& ctx) {
  Jet f = need_jet(ctx.prob, 0, "f");
  int max_weight = 12;
  if (ctx.prob.task_args.size() > 1 && ctx.prob.task_arg_ints[1] > 0)
    max_weight = static_cast<int>(ctx.prob.task_arg_ints[1]);

  SingularityReport sing = certify_isolated_singularity(f);
  ctx.payload["isolated"] = sing.isolated_certified ? "CERTIFIED" : "UNKNOWN";
  if (sing.k_found) ctx.payload["k_found"] = *sing.k_found;
  ctx.payload["window"] = sing.window;
  ctx.payload["witnesses"] = static_cast<int>(sing.witnesses.size());
  ctx.payload["witnesses_verified"] = verify_witnesses(sing, f);

  QuasiHomogeneityReport qh = detect_quasihomogeneity(f, max_weight);
  Json qj;
  qj["is_quasi_homogeneous"] = qh.is_qh;
  if (qh.weights) {
    qj["weights"] = weights_json(*qh.weights);
    qj["strict"] = qh.strict;
  }
  ctx.payload["quasi_homogeneity"] = std::move(qj);

  if (sing.isolated_certified) {
    ctx.text << "isolated singularity certified: m^" << *sing.k_found
             << " lies in the Jacobian ideal (mod degree " << sing.window + 1 << ")\n";
    return "SUCCESS";
  }
  ctx.text << "isolated singularity not certified up to degree " << sing.window << "\n";
  return "INCONCLUSIVE";
}

inline std::string task_theorem3(TaskContext& ctx) {
  PForm omega = need_form(ctx.prob, 0, "omega");
  Jet f = need_jet(ctx.prob, 1, "f");
  auto result = theorem3_criterion(omega, f);
  if (auto* ni = std::get_if<NotInvariant>(&result)) {
    ctx.payload["component"] = tuple_string(ni->component, ctx.names);
    ctx.payload["offending"] = jet_string(ni->offending, ctx.names);
    ctx.text << "(f = 0) is not invariant for omega\n";
    return "NOT_INVARIANT";
  }
  const auto& rep = std::get<Theorem3Report>(result);
  ctx.payload["nu_omega"] = rep.nu_omega;
  ctx.payload["nu_df"] = rep.nu_df;
  ctx.payload["isolated"] =
      rep.isolated == IsolatedStatus::Certified ? "CERTIFIED" : "UNKNOWN";
  if (rep.k_found) ctx.payload["k_found"] = *rep.k_found;
  ctx.payload["split_ok"] = rep.split_ok;
  ctx.payload["a_is_unit"] = rep.a_is_unit;
  ctx.payload["first_integral_expected"] = rep.first_integral_expected;
  ctx.text << "nu(omega) = " << rep.nu_omega << ", nu(df) = " << rep.nu_df << "\n";
  if (rep.isolated == IsolatedStatus::Unknown) {
    ctx.text << "isolated singularity could not be certified; criterion undecided\n";
    return "INCONCLUSIVE";
  }
  ctx.text << (rep.first_integral_expected
                   ? "criterion holds: a holomorphic first integral is expected\n"
                   : "criterion fails: no holomorphic first integral is expected\n");
  return rep.first_integral_expected ? "SUCCESS" : "FAIL";
}

inline std::string task_embed_qh(TaskContext& ctx) {
  PForm omega = need_form(ctx.prob, 0, "omega");
  Jet f = need_jet(ctx.prob, 1, "f");
  int max_weight = 12;
  if (ctx.prob.task_args.size() > 2 && ctx.prob.task_arg_ints[2] > 0)
    max_weight = static_cast<int>(ctx.prob.task_arg_ints[2]);

  QuasiHomogeneityReport qh = detect_quasihomogeneity(f, max_weight);
  if (!qh.is_qh || !qh.strict) {
    ctx.payload["is_quasi_homogeneous"] = qh.is_qh;
    ctx.payload["strict"] = qh.strict;
    ctx.text << "f is not strictly quasi-homogeneous within weight bound " << max_weight
             << "\n";
    return "INCONCLUSIVE";
  }
  const WeightVector& w = *qh.weights;
  ctx.payload["weights"] = weights_json(w);

  auto embedded = embed_as_deformation(omega, f, w, ctx.prob.torder);
  if (auto* ni = std::get_if<NotInvariant>(&embedded)) {
    ctx.payload["component"] = tuple_string(ni->component, ctx.names);
    ctx.payload["offending"] = jet_string(ni->offending, ctx.names);
    ctx.text << "(f = 0) is not invariant for omega\n";
    return "NOT_INVARIANT";
  }
  if (auto* cert = std::get_if<ObstructionCertificate>(&embedded)) {
    ctx.payload["obstruction"] = obstruction_json(*cert, ctx.names);
    ctx.text << "invariant split failed: " << cert->human_note << "\n";
    return "OBSTRUCTION";
  }
  auto& emb = std::get<EmbedOutcome>(embedded);
  ctx.payload["absorbed_unit"] = jet_string(emb.absorbed_unit, ctx.names);
  ctx.payload["family"] = tform_string(emb.family.as_tform(), ctx.names);

  CascadeReport cascade = check_cascade(emb.family);
  ctx.payload["cascade_passes"] = cascade.passed();
  if (!cascade.passed()) {
    ctx.payload["cascade"] = cascade_json(cascade, ctx.names, ctx.verbose);
    ctx.text << "embedded family fails the cascade (unexpected)\n";
    return "FAIL";
  }

  // The family evaluated at t = 1 must reproduce omega / a.
  PForm expected = omega.scaled_by(invert_unit(emb.absorbed_unit));
  PForm at_one = emb.family.as_tform().evaluated_at_one();
  const int common = std::min(expected.truncation_degree(), at_one.truncation_degree());
  ctx.payload["t1_matches"] = equal_up_to_degree(expected, at_one, common);

  auto result = normalize(emb.family);
  if (auto* cert = std::get_if<ObstructionCertificate>(&result)) {
    ctx.payload["obstruction"] = obstruction_json(*cert, ctx.names);
    ctx.text << "obstruction at t-order " << cert->t_order << "\n";
    return "OBSTRUCTION";
  }
  const auto& ok = std::get<NormalizationResult>(result);
  ctx.payload["F"] = tpoly_string(ok.F, ctx.names);
  ctx.payload["G"] = tpoly_string(ok.G, ctx.names);

  PForm omega_normalized = omega.scaled_by(invert_unit(emb.absorbed_unit));
  EmbeddedIntegralCheck t1 = check_embedded_first_integral(omega_normalized, ok.F, w);
  ctx.payload["t1_integral_checked_degree"] = t1.checked_degree;
  ctx.payload["t1_integral_valid"] = t1.valid;
  ctx.text << "embedded as a deformation with weights d = " << w.d
           << "; F(t=1) annihilates omega up to degree " << t1.checked_degree << "\n";
  return t1.valid && ctx.payload["t1_matches"].get<bool>() ? "SUCCESS" : "FAIL";
}

}  // namespace runner

/// Dispatches the problem's task, producing the certificate document and the
/// process exit code. User-level errors (bad arguments, malformed families)
/// surface as TaskError; parse and elaboration errors are thrown by the
/// respective stages before this point.
inline TaskOutcome run_problem(const ElaboratedProblem& prob, const RunOptions& opts) {
  runner::TaskContext ctx{prob, prob.variables, opts.verbose};
  std::string status;
  if (prob.task_name.empty()) throw runner::TaskError("no task directive in file");
  const std::string& t = prob.task_name;
  if (t == "check-integrability")
    status = runner::task_check_integrability(ctx);
  else if (t == "decompose-relative")
    status = runner::task_decompose_relative(ctx);
  else if (t == "decompose-invariant")
    status = runner::task_decompose_invariant(ctx);
  else if (t == "normalize")
    status = runner::task_normalize(ctx);
  else if (t == "certify")
    status = runner::task_certify(ctx);
  else if (t == "embed-qh")
    status = runner::task_embed_qh(ctx);
  else if (t == "analyze-singularity")
    status = runner::task_analyze_singularity(ctx);
  else if (t == "theorem3")
    status = runner::task_theorem3(ctx);
  else
    throw runner::TaskError("unknown task '" + t + "'");

  TaskOutcome outcome;
  outcome.status = status;
  outcome.exit_code = runner::exit_code_for(status);

  Json doc;
  doc["schema"] = 1;
  doc["generator"] = "germ-forge";
  doc["task"] = prob.task_name;
  doc["status"] = status;
  doc["variables"] = prob.variables;
  doc["dimension"] = prob.dimension;
  doc["degree"] = prob.degree;
  doc["torder"] = prob.torder;
  doc["payload"] = std::move(ctx.payload);
  outcome.certificate = std::move(doc);

  std::ostringstream text;
  text << "task: " << prob.task_name << "\n"
       << "degree D = " << prob.degree << ", t-order K = " << prob.torder << "\n"
       << ctx.text.str() << "status: " << status << "\n";
  outcome.human_text = text.str();
  return outcome;
}

inline TaskOutcome run_problem_text(const std::string& text, const RunOptions& opts) {
  ProblemFile file = parse_problem(text);
  ElaboratedProblem prob = elaborate(file, opts.degree, opts.torder);
  return run_problem(prob, opts);
}

}  // namespace germforge

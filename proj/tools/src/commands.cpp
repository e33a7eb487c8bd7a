#include "agd_cli/commands.hpp"

#include <cstdlib>
#include <sstream>

#include "agd/error.hpp"
#include "agd_cli/spec_io.hpp"

namespace agd::cli {

using nlohmann::json;

namespace {

json flags_json(const ClassFlags& f) {
  return json{{"qnil", f.qnil}, {"acc_class", f.acc_class}, {"g_drazin", f.g_drazin}, {"ag_drazin", f.ag_drazin}};
}

json residuals_json(const ResidualTable& t) {
  json out = json::object();
  for (const auto& [name, value] : t) out[name] = value;
  return out;
}

json operator_json(const StructuredOperator& op) {
  json out{{"description", op.describe()}, {"spec", operator_to_json(op)}};
  if (op.diagonal()) {
    json lead = json::array();
    for (std::size_t k = 1; k <= kLeadingEntries; ++k) lead.push_back(scalar_to_json(op.diagonal()->entry(k)));
    out["leading_diagonal"] = lead;
  }
  return out;
}

json set_json(const SpectralSet& s) {
  json out{{"description", s.describe()}, {"finite", s.is_finite()}};
  if (s.is_finite()) {
    json pts = json::array();
    for (const auto& z : s.finite_points()) pts.push_back(scalar_to_json(z));
    out["points"] = pts;
  }
  return out;
}

json certificate_json(const InverseCertificate& c) {
  json out{{"x", operator_json(c.x)},
           {"p", operator_json(c.p)},
           {"cut", c.cut ? json(to_string(*c.cut)) : json(nullptr)},
           {"formula", c.formula},
           {"card_class", c.card.to_string()},
           {"residual_spectrum", set_json(c.residual_spectrum)},
           {"residuals", residuals_json(c.residuals)},
           {"verified", c.verified}};
  if (c.reduced) out["reduced_pair"] = c.reduced->describe();
  return out;
}

json witness_json(const QuasipolarWitness& w) {
  return json{{"q", operator_json(w.q)},
              {"idempotent", w.idempotent},
              {"commutes", w.commutes},
              {"q_equals_ax_and_xa", w.in_both_ideals},
              {"complement_in_acc", w.complement_acc},
              {"core_invertible", w.core_invertible},
              {"residuals", residuals_json(w.residuals)}};
}

json config_json(const RunConfig& cfg) {
  json out{{"tol_res", cfg.tol.residual}, {"tol_eig", cfg.tol.cluster},  {"tol_rank", cfg.tol.rank},
           {"tol_idem", cfg.tol.idempotent}, {"gap", cfg.tol.gap},      {"tol_eq", cfg.tol.equality},
           {"separation", cfg.tol.separation}, {"depth", cfg.tol.sampling_depth}};
  return out;
}

Rational resolve_cut(const StructuredOperator& op, const std::optional<std::string>& text, const Tolerances& tol) {
  if (text && *text != "auto") return parse_rational(*text);
  auto c = auto_cut(op, tol);
  if (!c) throw Error(ErrorCode::CutInvalid, "no spectral gap admits a valid cut");
  return *c;
}

const StructuredOperator& require_with(const RunConfig& cfg, const std::string& command) {
  if (!cfg.with) throw Error(ErrorCode::UsageError, command + " needs --with <spec>");
  return *cfg.with;
}

json run_spectrum(const StructuredOperator& op, const RunConfig& cfg) {
  SpectralSet s = spectrum_of(op, cfg.tol);
  Structure st = derive_structure(s);
  return json{{"spectrum", set_json(s)},
              {"contains_zero", contains(s, ComplexScalar(), cfg.tol.equality)},
              {"sigma_d", set_json(st.acc)},
              {"sigma_ad", set_json(sigma_ad_of(s))},
              {"isolated", st.iso.describe()}};
}

json run_classify(const StructuredOperator& op, const RunConfig& cfg) {
  SpectralSet s = spectrum_of(op, cfg.tol);
  return json{{"flags", flags_json(classify_element(op, cfg.tol))},
              {"spectrum", s.describe()},
              {"sigma_d", sigma_d_of(s).describe()},
              {"sigma_ad", sigma_ad_of(s).describe()}};
}

json run_invert(const StructuredOperator& op, const RunConfig& cfg, json& residuals) {
  InverseCertificate cert = [&] {
    if (cfg.kind == "drazin") return drazin_certificate(op, cfg.tol);
    if (cfg.kind == "gdrazin") return gdrazin_inverse(op, cfg.tol);
    if (cfg.kind == "agdrazin") {
      if (!classify_element(op, cfg.tol).ag_drazin) {
        throw Error(ErrorCode::NotAGDInvertible, "0 is an accumulation point of sigma_d(a)");
      }
      return agdrazin_inverse(op, resolve_cut(op, cfg.cut, cfg.tol), cfg.tol);
    }
    throw Error(ErrorCode::UsageError, "--kind must be drazin, gdrazin or agdrazin");
  }();
  residuals = residuals_json(cert.residuals);
  json out{{"kind", cfg.kind}, {"certificate", certificate_json(cert)}};
  out["witness"] = witness_json(quasipolar_witness(op, cert.x, cfg.tol));
  return out;
}

json run_verify(const StructuredOperator& op, const RunConfig& cfg, json& residuals, int& exit_code) {
  const StructuredOperator& x = require_with(cfg, "verify");
  VerifyResult v = verify_certificate(op, x, cfg.tol);
  residuals = residuals_json(v.residuals);
  if (!v.ok) exit_code = 2;
  json out{{"candidate", operator_json(x)},
           {"ok", v.ok},
           {"commutes", v.commutes},
           {"xax_equals_x", v.xax_equals_x},
           {"residual_in_acc", v.residual_acc},
           {"card_class", v.card.to_string()},
           {"residual_spectrum", set_json(v.residual_spectrum)}};
  if (v.ok) out["witness"] = witness_json(quasipolar_witness(op, x, cfg.tol));
  return out;
}

json run_decompose(const StructuredOperator& op, const RunConfig& cfg, json& residuals, int& exit_code) {
  Rational cut = resolve_cut(op, cfg.cut, cfg.tol);
  CoreAccDecomposition d = core_acc_decompose(op, cut, cfg.tol);
  residuals = residuals_json(d.residuals);
  if (!d.ok()) exit_code = 2;
  return json{{"cut", to_string(cut)},
              {"x_part", operator_json(d.x_part)},
              {"y_part", operator_json(d.y_part)},
              {"sums_to_a", d.sums_to_a},
              {"xy_equals_yx_equals_0", d.annihilate},
              {"x_group_invertible", d.x_group_invertible},
              {"y_in_acc", d.y_acc},
              {"ok", d.ok()}};
}

json run_family(const StructuredOperator& op, const RunConfig& cfg) {
  std::vector<Rational> cuts;
  bool automatic = cfg.cuts.empty() || (cfg.cuts.size() == 1 && cfg.cuts.front() == "auto");
  if (automatic) {
    if (!classify_element(op, cfg.tol).ag_drazin) {
      throw Error(ErrorCode::NotAGDInvertible, "0 is an accumulation point of sigma_d(a)");
    }
    std::vector<Rational> all = candidate_cuts(op, cfg.tol);
    std::size_t from = all.size() > kAutoFamilySize ? all.size() - kAutoFamilySize : 0;
    cuts.assign(all.begin() + static_cast<std::ptrdiff_t>(from), all.end());
  } else {
    for (const auto& c : cfg.cuts) cuts.push_back(parse_rational(c));
  }
  InverseFamily fam = nonuniqueness_family(op, cuts, cfg.tol);
  json certs = json::array();
  for (const auto& c : fam.certificates) certs.push_back(certificate_json(c));
  json pairs = json::array();
  for (const auto& p : fam.pairs) {
    pairs.push_back(json{{"cuts", json::array({to_string(cuts[p.first]), to_string(cuts[p.second])})},
                         {"same_split", p.same_split},
                         {"same_inverse", p.same_inverse}});
  }
  return json{{"certificates", certs}, {"pairs", pairs}};
}

json run_perturb(const StructuredOperator& op, const RunConfig& cfg) {
  StructuredOperator q = finite_rank_perturb(op, cfg.edits, cfg.delta);
  SpectralSet before = spectrum_of(op, cfg.tol);
  SpectralSet after = spectrum_of(q, cfg.tol);
  SpectralSet d_before = sigma_d_of(before);
  SpectralSet d_after = sigma_d_of(after);
  return json{{"perturbed", operator_json(q)},
              {"spectrum_before", before.describe()},
              {"spectrum_after", after.describe()},
              {"sigma_d_before", d_before.describe()},
              {"sigma_d_after", d_after.describe()},
              {"sigma_d_unchanged", set_equal(d_before, d_after, cfg.tol.sampling_depth, cfg.tol.equality)},
              {"flags_before", flags_json(classify_set(before, cfg.tol.equality))},
              {"flags_after", flags_json(classify_set(after, cfg.tol.equality))}};
}

json run_product_check(const StructuredOperator& op, const RunConfig& cfg, int& exit_code) {
  const StructuredOperator& b = require_with(cfg, "product-check");
  ProductCheck pc = sigma_ad_product_check(op, b, cfg.tol);
  if (!pc.equal) exit_code = 2;
  return json{{"b", operator_json(b)},
              {"sigma_ad_ab", pc.ab.describe()},
              {"sigma_ad_ba", pc.ba.describe()},
              {"equal", pc.equal}};
}

void render_value(std::ostringstream& os, const json& v, int indent);

void render_object(std::ostringstream& os, const json& obj, int indent) {
  for (const auto& [key, value] : obj.items()) {
    os << std::string(static_cast<std::size_t>(indent), ' ') << key << ":";
    render_value(os, value, indent);
  }
}

bool is_flat(const json& v) {
  if (!v.is_array()) return !v.is_object();
  for (const auto& e : v) {
    if (e.is_object() || (e.is_array() && !is_flat(e))) return false;
  }
  return true;
}

void render_value(std::ostringstream& os, const json& v, int indent) {
  if (v.is_object()) {
    os << "\n";
    render_object(os, v, indent + 2);
  } else if (v.is_array() && !is_flat(v)) {
    os << "\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      os << std::string(static_cast<std::size_t>(indent + 2), ' ') << "[" << i << "]:";
      render_value(os, v[i], indent + 2);
    }
  } else if (v.is_string()) {
    os << " " << v.get<std::string>() << "\n";
  } else {
    os << " " << v.dump() << "\n";
  }
}

}  // namespace

void apply_environment(RunConfig& cfg) {
  if (const char* depth = std::getenv("AGD_DEPTH")) {
    char* end = nullptr;
    long v = std::strtol(depth, &end, 10);
    if (end == depth || *end != '\0' || v <= 0) throw Error(ErrorCode::UsageError, "AGD_DEPTH must be a positive integer");
    cfg.tol.sampling_depth = static_cast<std::size_t>(v);
  }
}

void validate_config(const RunConfig& cfg) {
  const Tolerances& t = cfg.tol;
  for (double v : {t.residual, t.idempotent, t.cluster, t.rank, t.separation, t.gap, t.equality}) {
    if (!(v > 0)) throw Error(ErrorCode::UsageError, "tolerances must be positive");
  }
  if (t.sampling_depth < 10) throw Error(ErrorCode::UsageError, "sampling depth must be at least 10");
  if (cfg.output != "text" && cfg.output != "json") throw Error(ErrorCode::UsageError, "--output must be text or json");
}

int exit_code_for(const Error& e) { return is_mathematical(e.code()) ? 2 : 1; }

Report error_report(const std::string& command, const Error& e) {
  Report r;
  r.exit_code = exit_code_for(e);
  r.body = json{{"schema", kReportSchema},
                {"command", command},
                {"status", "error"},
                {"exit_code", r.exit_code},
                {"error", json{{"code", code_name(e.code())}, {"message", e.what()}}}};
  return r;
}

Report run_command(const std::string& command, const StructuredOperator& op, const RunConfig& cfg) {
  Report r;
  try {
    validate_config(cfg);
    json residuals = json::object();
    json result;
    int exit_code = 0;
    if (command == "spectrum") {
      result = run_spectrum(op, cfg);
    } else if (command == "classify") {
      result = run_classify(op, cfg);
    } else if (command == "invert") {
      result = run_invert(op, cfg, residuals);
    } else if (command == "verify") {
      result = run_verify(op, cfg, residuals, exit_code);
    } else if (command == "decompose") {
      result = run_decompose(op, cfg, residuals, exit_code);
    } else if (command == "family") {
      result = run_family(op, cfg);
    } else if (command == "perturb") {
      result = run_perturb(op, cfg);
    } else if (command == "product-check") {
      result = run_product_check(op, cfg, exit_code);
    } else {
      throw Error(ErrorCode::UnknownCommand, "unknown command \"" + command + "\"");
    }
    r.exit_code = exit_code;
    r.body = json{{"schema", kReportSchema},
                  {"command", command},
                  {"input", operator_json(op)},
                  {"config", config_json(cfg)},
                  {"status", exit_code == 0 ? "ok" : "failed"},
                  {"exit_code", exit_code},
                  {"result", result},
                  {"residuals", residuals}};
  } catch (const Error& e) {
    r = error_report(command, e);
    r.body["config"] = config_json(cfg);
    r.body["input"] = json{{"description", op.describe()}, {"spec", operator_to_json(op)}};
  }
  return r;
}

std::string render_text(const json& body) {
  std::ostringstream os;
  render_object(os, body, 0);
  return os.str();
}

std::string render(const Report& report, const std::string& format) {
  if (format == "json") return report.body.dump(2) + "\n";
  return render_text(report.body);
}

}  // namespace agd::cli

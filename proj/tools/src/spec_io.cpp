#include "agd_cli/spec_io.hpp"

#include <fstream>
#include <sstream>

#include "agd/error.hpp"

namespace agd::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ParseError, field + ": " + what);
}

// Re-tags a library error with the field it came from, keeping its code.
template <class F>
auto in_field(const std::string& field, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    std::string what = e.what();
    if (what.rfind(field, 0) == 0) throw;
    throw Error(e.code(), field + ": " + what);
  }
}

const json& require(const json& j, const char* key, const std::string& field) {
  if (!j.is_object() || !j.contains(key)) fail(field, std::string("missing \"") + key + "\"");
  return j.at(key);
}

Polynomial polynomial_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of coefficients");
  std::vector<ComplexScalar> c;
  for (std::size_t i = 0; i < j.size(); ++i) c.push_back(scalar_from_json(j[i], field + "[" + std::to_string(i) + "]"));
  return Polynomial(std::move(c));
}

json polynomial_to_json(const Polynomial& p) {
  json out = json::array();
  for (const auto& c : p.coefficients()) out.push_back(scalar_to_json(c));
  return out;
}

RationalMap map_from_json(const json& j, const std::string& field) {
  if (j.is_string() && j.get<std::string>() == "identity") return RationalMap::identity();
  if (!j.is_object()) fail(field, "expected \"identity\" or {\"num\": [...], \"den\": [...]}");
  Polynomial num = polynomial_from_json(require(j, "num", field), field + ".num");
  Polynomial den = j.contains("den") ? polynomial_from_json(j.at("den"), field + ".den") : Polynomial::constant(1);
  if (den.is_zero()) fail(field + ".den", "zero denominator");
  return RationalMap(std::move(num), std::move(den));
}

json map_to_json(const RationalMap& m) {
  if (m.is_identity()) return "identity";
  return json{{"num", polynomial_to_json(m.numerator())}, {"den", polynomial_to_json(m.denominator())}};
}

std::map<std::size_t, ComplexScalar> overrides_from_json(const json& j, const std::string& field) {
  std::map<std::size_t, ComplexScalar> out;
  auto position = [&](long long pos, const std::string& f) {
    if (pos < 1) fail(f, "positions start at 1");
    return static_cast<std::size_t>(pos);
  };
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      std::size_t used = 0;
      long long pos = 0;
      try {
        pos = std::stoll(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != key.size()) fail(field, "bad position '" + key + "'");
      out[position(pos, field + "." + key)] = scalar_from_json(value, field + "." + key);
    }
    return out;
  }
  if (!j.is_array()) fail(field, "expected [[position, value], ...]");
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string f = field + "[" + std::to_string(i) + "]";
    if (!j[i].is_array() || j[i].size() != 2 || !j[i][0].is_number_integer()) fail(f, "expected [position, value]");
    out[position(j[i][0].get<long long>(), f)] = scalar_from_json(j[i][1], f);
  }
  return out;
}

DiagonalBlock diagonal_from_json(const json& j, const std::string& field) {
  PointFamily base = family_from_json(j, field);
  std::map<std::size_t, ComplexScalar> overrides;
  if (j.contains("overrides")) overrides = overrides_from_json(j.at("overrides"), field + ".overrides");
  std::vector<Rational> cuts;
  std::vector<RationalMap> maps{RationalMap::identity()};
  if (j.contains("cuts") || j.contains("maps")) {
    const json& jc = require(j, "cuts", field);
    const json& jm = require(j, "maps", field);
    if (!jc.is_array() || !jm.is_array()) fail(field, "\"cuts\" and \"maps\" must be arrays");
    maps.clear();
    for (std::size_t i = 0; i < jc.size(); ++i) cuts.push_back(rational_from_json(jc[i], field + ".cuts[" + std::to_string(i) + "]"));
    for (std::size_t i = 0; i < jm.size(); ++i) maps.push_back(map_from_json(jm[i], field + ".maps[" + std::to_string(i) + "]"));
  }
  return in_field(field, [&] { return DiagonalBlock(base, cuts, maps, overrides); });
}

json diagonal_to_json(const DiagonalBlock& d) {
  json out = family_to_json(d.base());
  if (!d.overrides().empty()) {
    json ov = json::array();
    for (const auto& [pos, v] : d.overrides()) ov.push_back(json::array({pos, scalar_to_json(v)}));
    out["overrides"] = ov;
  }
  if (!d.pure()) {
    json cuts = json::array();
    for (const auto& c : d.cuts()) cuts.push_back(to_string(c));
    json maps = json::array();
    for (const auto& m : d.maps()) maps.push_back(map_to_json(m));
    out["cuts"] = cuts;
    out["maps"] = maps;
  }
  return out;
}

}  // namespace

Rational rational_from_json(const json& j, const std::string& field) {
  if (j.is_string()) return in_field(field, [&] { return parse_rational(j.get<std::string>()); });
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number_float()) return in_field(field, [&] { return parse_rational(j.dump()); });
  fail(field, "expected a rational number");
}

ComplexScalar scalar_from_json(const json& j, const std::string& field) {
  if (j.is_array()) {
    if (j.size() != 2) fail(field, "expected [re, im]");
    return ComplexScalar(rational_from_json(j[0], field + ".re"), rational_from_json(j[1], field + ".im"));
  }
  return ComplexScalar(rational_from_json(j, field));
}

json scalar_to_json(const ComplexScalar& z) {
  if (!z.exact()) return json::array({z.value().real(), z.value().imag()});
  if (z.im() == 0) return to_string(z.re());
  return json::array({to_string(z.re()), to_string(z.im())});
}

PointFamily family_from_json(const json& j, const std::string& field) {
  if (!j.is_object()) fail(field, "expected a family object");
  const json& tag = require(j, "family", field);
  if (!tag.is_string()) fail(field + ".family", "expected a string");
  std::string kind = tag.get<std::string>();
  auto opt_scalar = [&](const char* key) {
    return j.contains(key) ? scalar_from_json(j.at(key), field + "." + key) : ComplexScalar();
  };
  return in_field(field, [&]() -> PointFamily {
    if (kind == "finite") {
      const json& pts = require(j, "points", field);
      if (!pts.is_array() || pts.empty()) fail(field + ".points", "expected a nonempty array");
      std::vector<ComplexScalar> v;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        v.push_back(scalar_from_json(pts[i], field + ".points[" + std::to_string(i) + "]"));
      }
      return PointFamily::finite(std::move(v));
    }
    if (kind == "power") {
      return PointFamily::power(scalar_from_json(require(j, "c", field), field + ".c"),
                                rational_from_json(require(j, "p", field), field + ".p"), opt_scalar("b"));
    }
    if (kind == "geometric") {
      return PointFamily::geometric(scalar_from_json(require(j, "c", field), field + ".c"),
                                    scalar_from_json(require(j, "r", field), field + ".r"), opt_scalar("b"));
    }
    if (kind == "cluster") {
      PointFamily centers = family_from_json(require(j, "centers", field), field + ".centers");
      PointFamily spread = family_from_json(require(j, "spread", field), field + ".spread");
      SpreadMode mode = SpreadMode::Additive;
      if (j.contains("mode")) {
        std::string m = j.at("mode").is_string() ? j.at("mode").get<std::string>() : "";
        if (m == "relative") {
          mode = SpreadMode::Relative;
        } else if (m != "additive") {
          fail(field + ".mode", "expected \"additive\" or \"relative\"");
        }
      }
      return PointFamily::cluster(centers, spread, mode, opt_scalar("anchor"));
    }
    throw Error(ErrorCode::MalformedFamily, "unknown family \"" + kind + "\"");
  });
}

json family_to_json(const PointFamily& f) {
  json out;
  switch (f.kind()) {
    case FamilyKind::Finite: {
      out["family"] = "finite";
      json pts = json::array();
      for (const auto& z : f.points()) pts.push_back(scalar_to_json(z));
      out["points"] = pts;
      break;
    }
    case FamilyKind::Power:
      out["family"] = "power";
      out["c"] = scalar_to_json(f.scale());
      out["p"] = to_string(f.exponent());
      if (!f.offset().is_zero()) out["b"] = scalar_to_json(f.offset());
      break;
    case FamilyKind::Geometric:
      out["family"] = "geometric";
      out["c"] = scalar_to_json(f.scale());
      out["r"] = scalar_to_json(f.ratio());
      if (!f.offset().is_zero()) out["b"] = scalar_to_json(f.offset());
      break;
    case FamilyKind::Cluster:
      out["family"] = "cluster";
      out["centers"] = family_to_json(f.centers());
      out["spread"] = family_to_json(f.spread());
      out["mode"] = f.mode() == SpreadMode::Relative ? "relative" : "additive";
      if (f.mode() == SpreadMode::Relative) out["anchor"] = scalar_to_json(f.anchor());
      break;
  }
  return out;
}

MatrixBlock matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected a nonempty array of rows");
  auto n = static_cast<Eigen::Index>(j.size());
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    std::string rf = field + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) fail(rf, "expected a row of length " + std::to_string(n));
    for (Eigen::Index c = 0; c < n; ++c) {
      ComplexScalar z = scalar_from_json(row[static_cast<std::size_t>(c)], rf + "[" + std::to_string(c) + "]");
      m(r, c) = z.exact() ? std::complex<double>(to_double(z.re()), to_double(z.im())) : z.value();
    }
  }
  return MatrixBlock(std::move(m));
}

StructuredOperator operator_from_json(const json& j) {
  if (!j.is_object()) fail("spec", "expected an object with \"matrix\" and/or \"diagonal\"");
  for (const auto& [key, value] : j.items()) {
    if (key != "matrix" && key != "diagonal") fail("spec", "unknown field \"" + key + "\"");
  }
  std::optional<MatrixBlock> m;
  if (j.contains("matrix")) m = matrix_from_json(j.at("matrix"), "matrix");
  std::optional<DiagonalBlock> d;
  if (j.contains("diagonal")) d = diagonal_from_json(j.at("diagonal"), "diagonal");
  return build_operator(std::move(m), std::move(d));
}

json operator_to_json(const StructuredOperator& op) {
  json out = json::object();
  if (op.has_matrix()) {
    json rows = json::array();
    const CMatrix& m = op.matrix().entries();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
      rows.push_back(row);
    }
    out["matrix"] = rows;
  }
  if (op.diagonal()) out["diagonal"] = diagonal_to_json(*op.diagonal());
  return out;
}

StructuredOperator parse_spec_text(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, source + ": " + e.what());
  }
  return in_field(source, [&] { return operator_from_json(j); });
}

StructuredOperator parse_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec_text(buf.str(), path);
}

std::map<std::size_t, ComplexScalar> parse_edits(const std::string& text) {
  std::map<std::size_t, ComplexScalar> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::UsageError, "edit '" + item + "' is not position=value");
    std::string pos_text = item.substr(0, eq);
    std::string value = item.substr(eq + 1);
    std::size_t used = 0;
    long long pos = 0;
    try {
      pos = std::stoll(pos_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != pos_text.size() || pos < 1) {
      throw Error(ErrorCode::UsageError, "edit position '" + pos_text + "' must be an integer >= 1");
    }
    auto colon = value.find(':');
    ComplexScalar z = colon == std::string::npos
                          ? ComplexScalar(parse_rational(value))
                          : ComplexScalar(parse_rational(value.substr(0, colon)), parse_rational(value.substr(colon + 1)));
    out[static_cast<std::size_t>(pos)] = z;
  }
  return out;
}

}  // namespace agd::cli

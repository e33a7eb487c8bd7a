#pragma once

#include <string>

#include <json.hpp>

#include "agd/operator_model.hpp"

namespace agd::cli {

// Operator spec files: {"matrix": rows of [re, im] pairs, "diagonal": {"family": ..., parameters,
// "overrides": [[position, value], ...], "cuts": [...], "maps": [{"num": [...], "den": [...]}, ...]}}.
// Scalars are "p/q" strings, JSON numbers (read as exact decimals) or [re, im] pairs of those.
StructuredOperator parse_spec(const std::string& path);
StructuredOperator parse_spec_text(const std::string& text, const std::string& source = "<spec>");
StructuredOperator operator_from_json(const nlohmann::json& j);
nlohmann::json operator_to_json(const StructuredOperator& op);

ComplexScalar scalar_from_json(const nlohmann::json& j, const std::string& field);
Rational rational_from_json(const nlohmann::json& j, const std::string& field);
nlohmann::json scalar_to_json(const ComplexScalar& z);
PointFamily family_from_json(const nlohmann::json& j, const std::string& field);
nlohmann::json family_to_json(const PointFamily& f);
MatrixBlock matrix_from_json(const nlohmann::json& j, const std::string& field);

// "3=1/2,5=-1:2" (position=value, value "re" or "re:im").
std::map<std::size_t, ComplexScalar> parse_edits(const std::string& text);

}  // namespace agd::cli

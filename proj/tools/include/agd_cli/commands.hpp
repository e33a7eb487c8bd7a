#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "agd/engine.hpp"
#include "agd/error.hpp"

namespace agd::cli {

inline constexpr const char* kReportSchema = "agdrazin-report/1";
// Number of candidate cuts used by `family --cuts auto`.
inline constexpr std::size_t kAutoFamilySize = 4;
// Diagonal entries echoed for every operator in a report.
inline constexpr std::size_t kLeadingEntries = 8;

struct RunConfig {
  Tolerances tol;
  std::string output = "text";
  std::string kind = "agdrazin";
  std::optional<std::string> cut;
  std::vector<std::string> cuts;
  std::optional<StructuredOperator> with;
  std::string with_source;
  std::map<std::size_t, ComplexScalar> edits;
  std::optional<MatrixBlock> delta;
};

// AGD_DEPTH replaces the default sampling depth.
void apply_environment(RunConfig& cfg);
// Throws UsageError for non-positive tolerances, depth below 10 or an unknown output format.
void validate_config(const RunConfig& cfg);

struct Report {
  nlohmann::json body;
  int exit_code = 0;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"spectrum", "classify", "invert",  "verify",
                                              "decompose", "family",  "perturb", "product-check"};
  return names;
}

// Never throws for library errors: they become an error record and exit code
// 2 (mathematical failure) or 1 (usage and representation limits).
Report run_command(const std::string& command, const StructuredOperator& op, const RunConfig& cfg);
Report error_report(const std::string& command, const Error& e);

int exit_code_for(const Error& e);
std::string render_text(const nlohmann::json& body);
std::string render(const Report& report, const std::string& format);

}  // namespace agd::cli

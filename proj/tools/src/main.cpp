#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "agd/error.hpp"
#include "agd_cli/commands.hpp"
#include "agd_cli/spec_io.hpp"

namespace {

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::ostringstream os;
  for (std::size_t i = 0; i < items.size(); ++i) os << (i ? sep : "") << items[i];
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  using agd::cli::RunConfig;
  CLI::App app{"Classify structured operators and construct ag-Drazin inverses.\n"
               "Commands: " + join(agd::cli::command_names(), ", ")};
  std::string command;
  std::string spec_path;
  std::string with_path;
  std::string delta_path;
  std::string edits;
  std::string cuts;
  RunConfig cfg;
  std::optional<std::size_t> depth;

  app.add_option("command", command, "Command to run")->required();
  app.add_option("spec", spec_path, "Operator spec file (JSON)")->required();
  app.add_option("--kind", cfg.kind, "Inverse kind for invert: drazin, gdrazin or agdrazin")
      ->check(CLI::IsMember({"drazin", "gdrazin", "agdrazin"}));
  app.add_option("--cut", cfg.cut, "Cut radius as p/q, or auto");
  app.add_option("--cuts", cuts, "Comma separated cut radii for family, or auto");
  app.add_option("--with", with_path, "Second operator spec (verify: candidate x, product-check: b)");
  app.add_option("--edits", edits, "Diagonal edits for perturb, e.g. 1=5,3=1/2:1");
  app.add_option("--delta", delta_path, "Spec whose matrix block is added by perturb");
  app.add_option("--tol-res", cfg.tol.residual, "Relative residual tolerance");
  app.add_option("--tol-eig", cfg.tol.cluster, "Eigenvalue clustering tolerance");
  app.add_option("--tol-rank", cfg.tol.rank, "Singular value rank threshold");
  app.add_option("--gap", cfg.tol.gap, "Minimum relative distance of a cut circle from the spectrum");
  app.add_option("--tol-eq", cfg.tol.equality, "Absolute equality tolerance for approximate scalars");
  app.add_option("--depth", depth, "Sampling depth for entrywise checks (overrides AGD_DEPTH)");
  app.add_option("--output", cfg.output, "Report format: text or json")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  agd::cli::Report report;
  try {
    agd::cli::apply_environment(cfg);
    if (depth) cfg.tol.sampling_depth = *depth;
    if (!cuts.empty()) {
      std::stringstream ss(cuts);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) cfg.cuts.push_back(item);
      }
    }
    if (!edits.empty()) cfg.edits = agd::cli::parse_edits(edits);
    if (!with_path.empty()) {
      cfg.with = agd::cli::parse_spec(with_path);
      cfg.with_source = with_path;
    }
    if (!delta_path.empty()) {
      agd::StructuredOperator d = agd::cli::parse_spec(delta_path);
      if (!d.has_matrix()) throw agd::Error(agd::ErrorCode::UsageError, "--delta spec has no matrix block");
      cfg.delta = d.matrix();
    }
    agd::StructuredOperator op = agd::cli::parse_spec(spec_path);
    report = agd::cli::run_command(command, op, cfg);
  } catch (const agd::Error& e) {
    report = agd::cli::error_report(command, e);
  }
  std::cout << agd::cli::render(report, cfg.output);
  return report.exit_code;
}

// Command-line front end: run scenarios, export fixtures, render reports.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tmlift/tmlift.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw tmlift::ScenarioError("$", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw tmlift::ScenarioError("$", "cannot write '" + output + "'");
  out << text;
}

std::string render(const tmlift::json& report, const std::string& format) {
  return format == "text" ? tmlift::render_text(report) : report.dump(2) + "\n";
}

int run(const std::string& file, const std::string& format, const std::string& output) {
  const auto scenario = tmlift::parse_scenario(slurp(file), file);
  const auto report = tmlift::run_scenario(scenario);
  emit(render(tmlift::to_json(report), format), output);
  return report.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numeric certification of lifted 2-forms on tangent bundles"};
  app.require_subcommand(1);

  std::string file, format = "json", output;
  auto* run_cmd = app.add_subcommand("run", "Run the checks of a scenario file");
  run_cmd->add_option("file", file, "Scenario JSON")->required();
  run_cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
  run_cmd->add_option("-o,--output", output, "Write the report here instead of stdout");

  auto* fx = app.add_subcommand("fixtures", "Built-in example scenarios");
  fx->require_subcommand(1);
  auto* fx_list = fx->add_subcommand("list", "List fixture names");
  std::string fx_name, fx_path;
  auto* fx_export = fx->add_subcommand("export", "Write a fixture as a scenario file");
  fx_export->add_option("name", fx_name)->required();
  fx_export->add_option("path", fx_path)->required();

  std::string report_file, report_format = "text";
  auto* rep = app.add_subcommand("report", "Re-render a saved JSON report");
  rep->add_option("report", report_file, "Report JSON")->required();
  rep->add_option("--format", report_format, "Output format")->check(CLI::IsMember({"json", "text"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tmlift::kExitInputError;
  }

  try {
    if (*run_cmd) return run(file, format, output);
    if (*fx_list) {
      for (const auto& n : tmlift::fixture_names()) std::cout << n << "\n";
      return 0;
    }
    if (*fx_export) {
      emit(tmlift::build_fixture(fx_name).document.dump(2) + "\n", fx_path);
      return 0;
    }
    if (*rep) {
      const auto j = tmlift::json::parse(slurp(report_file));
      std::cout << render(j, report_format);
      return j.at("verdict") == "pass" ? tmlift::kExitPass : tmlift::kExitResidualFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tmlift::kExitInputError;
  }
  return tmlift::kExitInputError;
}

// Command-line front end: plan, sweep and validate restoration cases.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridrestore/case_file.hpp"
#include "gridrestore/report.hpp"

namespace {

using namespace gridrestore;

struct Options {
  std::string case_path;
  std::optional<double> omega;
  std::vector<double> omegas;
  double step = 0.1;
  std::optional<std::uint64_t> seed;
  std::optional<double> switch_minutes;
  std::optional<double> fluctuation;
  std::string output;
  std::string format = "table";
};

int emit(const Options& opt, const std::string& text) {
  if (opt.output.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(opt.output, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write " << opt.output << '\n';
    return 1;
  }
  return 0;
}

RunOverrides overrides_of(const Options& opt) { return {opt.omega, opt.switch_minutes, opt.fluctuation}; }

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("case", opt.case_path, "Case file")->required();
  cmd->add_option("--seed", opt.seed, "Seed for omitted load frequency coefficients");
  cmd->add_option("--switch-minutes", opt.switch_minutes, "Minutes per switching action")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--fluctuation", opt.fluctuation, "Worst-case load fluctuation fraction")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--output", opt.output, "Write the report to a file instead of stdout");
  cmd->add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"table", "machine"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blackout restoration sequencing"};
  app.require_subcommand(1);
  Options opt;

  auto* plan = app.add_subcommand("plan", "Plan the restoration sequence for one omega");
  add_common(plan, opt);
  plan->add_option("--omega", opt.omega, "Importance/distance weight in [0, 1]")->check(CLI::Range(0.0, 1.0));

  auto* sweep = app.add_subcommand("sweep", "Plan for a grid of omega values");
  add_common(sweep, opt);
  sweep->add_option("--omega", opt.omegas, "Omega values (comma separated)")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  sweep->add_option("--step", opt.step, "Grid step over [0, 1] when --omega is absent")
      ->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Parse and validate a case file");
  validate->add_option("case", opt.case_path, "Case file")->required();
  validate->add_option("--seed", opt.seed, "Seed for omitted load frequency coefficients");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const CaseFile c = parse_case_file(opt.case_path, opt.seed);

    if (*validate) {
      const Grid& g = c.grid;
      std::cout << "ok: " << (c.name.empty() ? opt.case_path : c.name) << ": " << g.buses().size() << " buses, "
                << g.lines().size() << " lines, " << g.generators().size() << " units, " << g.loads().size()
                << " loads\n";
      return 0;
    }

    if (*plan) {
      const PlanReport report = run_plan(c, overrides_of(opt));
      const int io = emit(opt, opt.format == "machine" ? render_machine(report) : render_table(report));
      return io != 0 ? io : exit_status(report);
    }

    std::vector<double> omegas = opt.omegas;
    if (omegas.empty()) {
      const int steps = static_cast<int>(1.0 / opt.step + 1e-9);
      for (int i = 0; i <= steps; ++i) omegas.push_back(std::round(i * opt.step * 1e12) / 1e12);
    }
    std::vector<std::string> warnings;
    const SweepReport report = run_sweep(c, omegas, overrides_of(opt), &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    const int io = emit(opt, opt.format == "machine" ? render_machine(report) : render_table(report));
    return io != 0 ? io : exit_status(report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

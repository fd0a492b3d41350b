#ifndef GRIDRESTORE_REPORT_HPP
#define GRIDRESTORE_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "gridrestore/case_file.hpp"
#include "gridrestore/planner.hpp"

namespace gridrestore {

struct ReportRow {
  int index = 0;  // 1-based
  std::string kind;
  std::string target;
  double t_minutes = 0.0;
  std::optional<Diagnostics> diagnostics;
  SystemState state;  // kept for replay in the machine format
};

struct PlanReport {
  std::string case_name;
  double omega = 0.0;
  std::vector<ReportRow> rows;
  double total_minutes = 0.0;
  double served_mw = 0.0;
  double unserved_mw = 0.0;
  std::vector<UnservedLoad> unserved;
  std::string bus_sequence;  // "B36,B35, B22, ..." style
};

struct SweepReport {
  std::string case_name;
  std::vector<PlanReport> plans;  // ascending omega
};

/// Buses touched by the plan, in order, with an energization immediately
/// followed by an action at the same bus collapsed into one entry. The
/// black-start buses are joined by ',' and the rest follow as ", Bn".
std::string bus_sequence(const RestorationPlan& plan);

PlanReport make_report(const Grid& grid, const RestorationPlan& plan, const std::string& case_name);
SweepReport make_sweep_report(const Grid& grid, const std::vector<std::pair<double, RestorationPlan>>& plans,
                              const std::string& case_name);

std::string render_table(const PlanReport& report);
std::string render_table(const SweepReport& report);

/// JSON documents; key order and number formatting are fixed, so equal
/// reports serialize to equal bytes.
std::string render_machine(const PlanReport& report);
std::string render_machine(const SweepReport& report);

struct RunOverrides {
  std::optional<double> omega;
  std::optional<double> switch_minutes;
  std::optional<double> fluctuation;
};

/// Plans the case at its own omega unless overridden. Throws
/// std::invalid_argument for out-of-range overrides before planning.
PlanReport run_plan(const CaseFile& c, const RunOverrides& overrides = {});

/// One plan per distinct omega, ascending. Duplicates are dropped and noted
/// in `warnings` when given.
SweepReport run_sweep(const CaseFile& c, std::vector<double> omegas, const RunOverrides& overrides = {},
                      std::vector<std::string>* warnings = nullptr);

/// 0 when every load is served, 2 otherwise.
int exit_status(const PlanReport& report);
int exit_status(const SweepReport& report);

}  // namespace gridrestore

#endif  // GRIDRESTORE_REPORT_HPP

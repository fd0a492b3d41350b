#include "gridrestore/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <sstream>

#include <json.hpp>

namespace gridrestore {

namespace {

using nlohmann::json;

std::string unit_label(const Grid& grid, UnitId id) {
  const GeneratorUnit& unit = grid.generator(id);
  return unit.name.empty() ? "G" + std::to_string(id.value) : unit.name;
}

std::string printf_string(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

// Values that print as zero at four decimals, without a minus sign.
double tidy(double v) { return std::abs(v) < 5e-5 ? 0.0 : v; }

json state_json(const SystemState& s) {
  json j;
  j["t_minutes"] = s.t_minutes;
  j["delta_f"] = s.delta_f;
  json buses = json::array();
  for (BusId b : s.energized_buses) buses.push_back(b.value);
  j["energized_buses"] = buses;
  json units = json::array();
  for (const auto& [id, d] : s.online_units) units.push_back({{"unit", id.value}, {"p", d.p}, {"q", d.q}});
  j["online_units"] = units;
  json loads = json::array();
  for (const auto& [id, d] : s.restored_loads) loads.push_back({{"load", id.value}, {"p", d.p}, {"q", d.q}});
  j["restored_loads"] = loads;
  json volts = json::array();
  for (const auto& [b, v] : s.voltages) volts.push_back({{"bus", b.value}, {"magnitude", v.magnitude}, {"angle", v.angle}});
  j["voltages"] = volts;
  return j;
}

json plan_json(const PlanReport& r) {
  json j;
  j["case"] = r.case_name;
  j["omega"] = r.omega;
  json rows = json::array();
  for (const ReportRow& row : r.rows) {
    json x{{"index", row.index}, {"kind", row.kind}, {"target", row.target}, {"t_minutes", row.t_minutes}};
    if (row.diagnostics)
      x["diagnostics"] = {{"delta_f", row.diagnostics->delta_f},
                          {"min_dv", row.diagnostics->min_dv},
                          {"max_dv", row.diagnostics->max_dv}};
    else
      x["diagnostics"] = nullptr;
    x["state"] = state_json(row.state);
    rows.push_back(std::move(x));
  }
  j["rows"] = rows;
  json unserved = json::array();
  for (const auto& u : r.unserved) unserved.push_back({{"load", u.load.value}, {"reason", u.reason}});
  j["summary"] = {{"total_minutes", r.total_minutes},
                  {"served_mw", r.served_mw},
                  {"unserved_mw", r.unserved_mw},
                  {"unserved_loads", unserved},
                  {"bus_sequence", r.bus_sequence}};
  return j;
}

}  // namespace

std::string bus_sequence(const RestorationPlan& plan) {
  std::string out;
  const auto& actions = plan.actions;
  bool in_prefix = true;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto& a = actions[i];
    if (a.kind == ActionKind::Energize && i + 1 < actions.size() && actions[i + 1].bus == a.bus &&
        actions[i + 1].kind != ActionKind::Energize)
      continue;
    const std::string entry = "B" + std::to_string(a.bus.value);
    if (out.empty()) {
      out = entry;
    } else if (in_prefix && a.kind == ActionKind::BlackStart) {
      out += "," + entry;
    } else {
      out += ", " + entry;
    }
    if (a.kind != ActionKind::BlackStart) in_prefix = false;
  }
  return out;
}

PlanReport make_report(const Grid& grid, const RestorationPlan& plan, const std::string& case_name) {
  PlanReport r;
  r.case_name = case_name;
  r.omega = plan.omega;
  r.total_minutes = plan.total_minutes;
  r.unserved = plan.unserved_loads;
  r.bus_sequence = bus_sequence(plan);
  int index = 0;
  for (const RestorationAction& a : plan.actions) {
    ReportRow row;
    row.index = ++index;
    row.kind = std::string(to_string(a.kind));
    switch (a.kind) {
      case ActionKind::BlackStart:
      case ActionKind::StartUnit:
        row.target = unit_label(grid, *a.unit) + " (B" + std::to_string(a.bus.value) + ")";
        break;
      case ActionKind::Energize:
        row.target = "B" + std::to_string(a.bus.value);
        break;
      case ActionKind::PickUp:
        row.target = "L" + std::to_string(a.load->value) + " (B" + std::to_string(a.bus.value) + ")";
        r.served_mw += grid.load(*a.load).p;
        break;
    }
    row.t_minutes = a.t_minutes;
    row.diagnostics = a.diagnostics;
    row.state = a.state;
    r.rows.push_back(std::move(row));
  }
  for (const auto& u : plan.unserved_loads) r.unserved_mw += grid.load(u.load).p;
  return r;
}

SweepReport make_sweep_report(const Grid& grid, const std::vector<std::pair<double, RestorationPlan>>& plans,
                              const std::string& case_name) {
  SweepReport s;
  s.case_name = case_name;
  for (const auto& [_, plan] : plans) s.plans.push_back(make_report(grid, plan, case_name));
  return s;
}

std::string render_table(const PlanReport& r) {
  std::ostringstream out;
  char line[256];
  out << "Restoration plan";
  if (!r.case_name.empty()) out << " for " << r.case_name;
  out << " (omega = " << printf_string("%.2f", r.omega) << ")\n";
  std::snprintf(line, sizeof line, "%4s  %-10s  %-16s  %8s  %9s  %9s  %9s\n", "#", "action", "target", "t [min]",
                "df [Hz]", "min dV", "max dV");
  out << line;
  for (const ReportRow& row : r.rows) {
    if (row.diagnostics) {
      std::snprintf(line, sizeof line, "%4d  %-10s  %-16s  %8.1f  %9.4f  %9.4f  %9.4f\n", row.index, row.kind.c_str(),
                    row.target.c_str(), row.t_minutes, tidy(row.diagnostics->delta_f), tidy(row.diagnostics->min_dv),
                    tidy(row.diagnostics->max_dv));
    } else {
      std::snprintf(line, sizeof line, "%4d  %-10s  %-16s  %8.1f  %9s  %9s  %9s\n", row.index, row.kind.c_str(),
                    row.target.c_str(), row.t_minutes, "-", "-", "-");
    }
    out << line;
  }
  out << "\nsequence:      " << r.bus_sequence << '\n';
  out << "total_minutes: " << printf_string("%.1f", r.total_minutes) << '\n';
  out << "served MW:     " << printf_string("%.2f", r.served_mw) << '\n';
  out << "unserved MW:   " << printf_string("%.2f", r.unserved_mw) << '\n';
  for (const auto& u : r.unserved) out << "  unserved L" << u.load.value << ": " << u.reason << '\n';
  return out.str();
}

std::string render_table(const SweepReport& s) {
  std::ostringstream out;
  out << "Control variable omega   Restoration Actions\n";
  for (const PlanReport& r : s.plans) {
    char head[32];
    std::snprintf(head, sizeof head, "%-24.1f ", r.omega);
    out << head << r.bus_sequence;
    if (!r.unserved.empty()) out << "   (unserved: " << r.unserved.size() << ")";
    out << '\n';
  }
  return out.str();
}

namespace {

PlannerConfig config_for(const CaseFile& c, const RunOverrides& o) {
  PlannerConfig config = c.planner_config();
  if (o.switch_minutes) {
    if (!(*o.switch_minutes >= 0)) throw std::invalid_argument("switch minutes must be nonnegative");
    config.switch_minutes = *o.switch_minutes;
  }
  if (o.fluctuation) {
    if (!(*o.fluctuation >= 0 && *o.fluctuation <= 1)) throw std::invalid_argument("fluctuation must lie in [0, 1]");
    config.fluctuation = *o.fluctuation;
  }
  return config;
}

}  // namespace

PlanReport run_plan(const CaseFile& c, const RunOverrides& overrides) {
  const double omega = overrides.omega.value_or(c.planner.omega);
  if (!(omega >= 0 && omega <= 1)) throw std::invalid_argument("omega must lie in [0, 1]");
  const PlannerConfig config = config_for(c, overrides);
  return make_report(c.grid, plan_restoration(c.grid, ScoreWeights{omega}, config), c.name);
}

SweepReport run_sweep(const CaseFile& c, std::vector<double> omegas, const RunOverrides& overrides,
                      std::vector<std::string>* warnings) {
  for (double w : omegas)
    if (!(w >= 0 && w <= 1)) throw std::invalid_argument("omega must lie in [0, 1]");
  const PlannerConfig config = config_for(c, overrides);
  std::sort(omegas.begin(), omegas.end());
  const auto last = std::unique(omegas.begin(), omegas.end());
  if (last != omegas.end() && warnings)
    warnings->push_back("ignoring " + std::to_string(omegas.end() - last) + " duplicate omega value(s)");
  omegas.erase(last, omegas.end());
  return make_sweep_report(c.grid, sweep_omega(c.grid, omegas, config), c.name);
}

int exit_status(const PlanReport& report) { return report.unserved.empty() ? 0 : 2; }

int exit_status(const SweepReport& report) {
  for (const PlanReport& r : report.plans)
    if (!r.unserved.empty()) return 2;
  return 0;
}

std::string render_machine(const PlanReport& report) { return plan_json(report).dump(2) + "\n"; }

std::string render_machine(const SweepReport& s) {
  json j;
  j["case"] = s.case_name;
  json plans = json::array();
  for (const PlanReport& r : s.plans) plans.push_back(plan_json(r));
  j["plans"] = plans;
  return j.dump(2) + "\n";
}

}  // namespace gridrestore

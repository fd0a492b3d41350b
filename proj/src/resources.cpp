#include "gridrestore/resources.hpp"

#include <cmath>

namespace gridrestore {

double wind_available(const WindProfile& profile, double t_minutes) {
  if (profile.samples.empty()) return 0.0;
  const double slot = std::floor(std::max(0.0, t_minutes) / profile.resolution_minutes);
  const auto last = profile.samples.size() - 1;
  const auto index = slot >= static_cast<double>(last) ? last : static_cast<std::size_t>(slot);
  return profile.samples[index];
}

std::string_view to_string(UnitKind kind) {
  switch (kind) {
    case UnitKind::Thermal:
      return "thermal";
    case UnitKind::Chp:
      return "chp";
    case UnitKind::Wind:
      return "wind";
  }
  return "thermal";
}

std::optional<UnitKind> unit_kind_from_string(std::string_view text) {
  if (text == "thermal") return UnitKind::Thermal;
  if (text == "chp") return UnitKind::Chp;
  if (text == "wind") return UnitKind::Wind;
  return std::nullopt;
}

void validate(const GeneratorUnit& unit) {
  const std::string who = "generator " + std::to_string(unit.id.value);
  if (unit.p_min > unit.p_max) throw InvalidModel(who + ": p_min exceeds p_max");
  if (unit.q_min > unit.q_max) throw InvalidModel(who + ": q_min exceeds q_max");
  if (unit.droop_k < 0) throw InvalidModel(who + ": negative droop");
  if (unit.cranking_power < 0) throw InvalidModel(who + ": negative cranking power");
  if (unit.black_start && unit.cranking_power != 0)
    throw InvalidModel(who + ": black-start unit with nonzero cranking power");
  if (unit.startup_hot_minutes < 0 || unit.startup_cold_minutes < 0 || unit.hot_window_minutes < 0)
    throw InvalidModel(who + ": negative startup timing");
  if (unit.chp_region) {
    if (unit.kind != UnitKind::Chp) throw InvalidModel(who + ": CHP region on a non-CHP unit");
    try {
      validate(*unit.chp_region);
    } catch (const InvalidModel& e) {
      throw InvalidModel(who + ": " + e.what());
    }
    if (unit.chp_heat_mw < 0) throw InvalidModel(who + ": negative heat output");
  }
  if (unit.wind_profile) {
    if (unit.kind != UnitKind::Wind) throw InvalidModel(who + ": wind profile on a non-wind unit");
    const auto& profile = *unit.wind_profile;
    if (profile.resolution_minutes <= 0) throw InvalidModel(who + ": wind resolution must be positive");
    if (profile.samples.empty()) throw InvalidModel(who + ": empty wind profile");
    for (double s : profile.samples)
      if (s < 0 || s > unit.p_max) throw InvalidModel(who + ": wind sample outside [0, p_max]");
  }
}

double available_output(const GeneratorUnit& unit, double t_minutes) {
  double cap = unit.p_max;
  if (unit.kind == UnitKind::Chp && unit.chp_region) {
    const auto p = chp_max_electric(*unit.chp_region, unit.chp_heat_mw);
    cap = p ? std::min(cap, *p) : 0.0;
  } else if (unit.kind == UnitKind::Wind && unit.wind_profile) {
    cap = std::min(cap, wind_available(*unit.wind_profile, t_minutes));
  }
  return std::max(cap, 0.0);
}

double startup_duration(const GeneratorUnit& unit, double t_since_blackout_minutes) {
  if (unit.kind != UnitKind::Thermal || unit.black_start)
    throw NotApplicable("generator " + std::to_string(unit.id.value) + " self-starts");
  return t_since_blackout_minutes <= unit.hot_window_minutes ? unit.startup_hot_minutes
                                                             : unit.startup_cold_minutes;
}

}  // namespace gridrestore

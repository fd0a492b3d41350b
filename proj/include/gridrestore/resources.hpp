#ifndef GRIDRESTORE_RESOURCES_HPP
#define GRIDRESTORE_RESOURCES_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridrestore/errors.hpp"
#include "gridrestore/ids.hpp"

namespace gridrestore {

// ---------------------------------------------------------------------------
// CHP feasible operation region
// ---------------------------------------------------------------------------

/// Convex polygon in the (electric P, thermal H) plane, both in MW. Vertices
/// may be given in either winding order; the region is closed.
template <typename Scalar>
struct BasicChpRegion {
  using Point = Eigen::Matrix<Scalar, 2, 1>;
  std::vector<Point> vertices;
};

using ChpRegion = BasicChpRegion<double>;

namespace detail {

template <typename Scalar>
Scalar cross2(const Eigen::Matrix<Scalar, 2, 1>& a, const Eigen::Matrix<Scalar, 2, 1>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

template <typename Scalar>
Scalar signed_area(const BasicChpRegion<Scalar>& region) {
  const auto& v = region.vertices;
  Scalar twice = 0;
  for (std::size_t i = 0; i < v.size(); ++i) twice += cross2(v[i], v[(i + 1) % v.size()]);
  return twice / 2;
}

template <typename Scalar>
Scalar extent(const BasicChpRegion<Scalar>& region) {
  Scalar lo_p = std::numeric_limits<Scalar>::max(), hi_p = std::numeric_limits<Scalar>::lowest();
  Scalar lo_h = lo_p, hi_h = hi_p;
  for (const auto& p : region.vertices) {
    lo_p = std::min(lo_p, p.x());
    hi_p = std::max(hi_p, p.x());
    lo_h = std::min(lo_h, p.y());
    hi_h = std::max(hi_h, p.y());
  }
  return std::max(hi_p - lo_p, hi_h - lo_h);
}

}  // namespace detail

/// Throws InvalidModel unless the region has at least three vertices, is
/// strictly convex in a consistent winding, and lies in the first quadrant.
template <typename Scalar>
void validate(const BasicChpRegion<Scalar>& region) {
  const auto& v = region.vertices;
  if (v.size() < 3) throw InvalidModel("CHP region needs at least 3 vertices");
  for (const auto& p : v)
    if (p.x() < 0 || p.y() < 0) throw InvalidModel("CHP region vertex with negative P or H");
  const Scalar area = detail::signed_area(region);
  if (area == 0) throw InvalidModel("CHP region is degenerate");
  const Scalar orientation = area > 0 ? 1 : -1;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    const auto& c = v[(i + 2) % v.size()];
    if (orientation * detail::cross2<Scalar>(b - a, c - b) <= 0)
      throw InvalidModel("CHP region is not strictly convex");
  }
}

/// True iff (p, h) lies inside or on the boundary of the region.
template <typename Scalar>
bool chp_contains(const BasicChpRegion<Scalar>& region, Scalar p, Scalar h) {
  using Point = typename BasicChpRegion<Scalar>::Point;
  const auto& v = region.vertices;
  const Scalar orientation = detail::signed_area(region) > 0 ? 1 : -1;
  // Boundary slack, as a distance, relative to the polygon size.
  const Scalar slack = Scalar(1e-10) * detail::extent(region);
  const Point q(p, h);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point edge = v[(i + 1) % v.size()] - v[i];
    const Scalar distance = orientation * detail::cross2<Scalar>(edge, q - v[i]) / edge.norm();
    if (distance < -slack) return false;
  }
  return true;
}

/// Largest electric output attainable at thermal output h, or nullopt when the
/// horizontal slice of the region at h is empty.
template <typename Scalar>
std::optional<Scalar> chp_max_electric(const BasicChpRegion<Scalar>& region, Scalar h) {
  const auto& v = region.vertices;
  std::optional<Scalar> best;
  auto offer = [&best](Scalar p) {
    if (!best || p > *best) best = p;
  };
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    const Scalar lo = std::min(a.y(), b.y());
    const Scalar hi = std::max(a.y(), b.y());
    if (h < lo || h > hi) continue;
    if (a.y() == b.y()) {
      offer(std::max(a.x(), b.x()));
    } else {
      const Scalar s = (h - a.y()) / (b.y() - a.y());
      offer(a.x() + s * (b.x() - a.x()));
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Wind output series
// ---------------------------------------------------------------------------

struct WindProfile {
  int resolution_minutes = 5;
  std::vector<double> samples;  // MW
};

/// Zero-order hold over the series; the last sample is held past its end.
double wind_available(const WindProfile& profile, double t_minutes);

// ---------------------------------------------------------------------------
// Generating units
// ---------------------------------------------------------------------------

enum class UnitKind { Thermal, Chp, Wind };

std::string_view to_string(UnitKind kind);
std::optional<UnitKind> unit_kind_from_string(std::string_view text);

struct GeneratorUnit {
  UnitId id;
  std::string name;  // display label; may be empty
  BusId bus;
  UnitKind kind = UnitKind::Thermal;
  double p_min = 0.0;  // MW
  double p_max = 0.0;
  double q_min = 0.0;  // MVar
  double q_max = 0.0;
  double droop_k = 0.0;  // MW per Hz
  bool black_start = false;
  double cranking_power = 0.0;  // MW
  double startup_hot_minutes = 0.0;
  double startup_cold_minutes = 0.0;
  double hot_window_minutes = 0.0;
  bool online = false;

  // Kind-specific operating data.
  std::optional<ChpRegion> chp_region;
  double chp_heat_mw = 0.0;  // fixed thermal output H for a CHP unit
  std::optional<WindProfile> wind_profile;
};

/// Fraction of p_max assumed as cranking power when a case omits it.
inline constexpr double kDefaultCrankingFraction = 0.05;

/// Checks the unit's own invariants (bounds ordering, droop sign, cranking
/// rules, kind-specific data). Throws InvalidModel.
void validate(const GeneratorUnit& unit);

/// Upper active power bound at time t: p_max, further limited by the CHP
/// region at the unit's heat output or by the wind series.
double available_output(const GeneratorUnit& unit, double t_minutes);

/// Minutes from the start command until a non-black-start thermal unit can
/// deliver power. Throws NotApplicable for self-starting or non-thermal units.
double startup_duration(const GeneratorUnit& unit, double t_since_blackout_minutes);

}  // namespace gridrestore

#endif  // GRIDRESTORE_RESOURCES_HPP

#ifndef GRIDRESTORE_TESTS_SUPPORT_HPP
#define GRIDRESTORE_TESTS_SUPPORT_HPP

// Fixtures and slow reference implementations shared by the unit tests and
// the acceptance suite.

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "gridrestore/dpf.hpp"
#include "gridrestore/grid.hpp"
#include "gridrestore/planner.hpp"

namespace support {

using namespace gridrestore;

inline Bus bus(int id, double v = 1.0) { return Bus{BusId{id}, v, false}; }

inline Line line(int from, int to, double r = 0.001, double x = 0.01, double b = 0.0) {
  return Line{BusId{from}, BusId{to}, r, x, b, true};
}

inline GeneratorUnit thermal(int id, int at, double p_max, double droop, double crank = 0.0) {
  GeneratorUnit g;
  g.id = UnitId{id};
  g.bus = BusId{at};
  g.kind = UnitKind::Thermal;
  g.p_max = p_max;
  g.q_min = -p_max;
  g.q_max = p_max;
  g.droop_k = droop;
  g.cranking_power = crank;
  g.startup_hot_minutes = 30;
  g.startup_cold_minutes = 120;
  g.hot_window_minutes = 60;
  return g;
}

inline GeneratorUnit black_start(int id, int at, double p_max, double droop) {
  GeneratorUnit g = thermal(id, at, p_max, droop);
  g.black_start = true;
  return g;
}

inline LoadPoint load(int id, int at, double p, double q, double alpha, double k_lp = 0.0, double k_lq = 0.0) {
  return LoadPoint{LoadId{id}, BusId{at}, p, q, alpha, k_lp, k_lq, false};
}

// ---------------------------------------------------------------------------
// Hop counts
// ---------------------------------------------------------------------------

// Shortest path length by enumerating every simple path.
inline std::optional<int> enumerate_hops(const Grid& grid, BusId from, BusId to) {
  std::optional<int> best;
  std::set<BusId> on_path{from};
  std::function<void(BusId, int)> walk = [&](BusId at, int depth) {
    if (at == to) {
      if (!best || depth < *best) best = depth;
      return;
    }
    for (BusId n : grid.neighbors(at)) {
      if (on_path.contains(n)) continue;
      on_path.insert(n);
      walk(n, depth + 1);
      on_path.erase(n);
    }
  };
  walk(from, 0);
  return best;
}

// Hop counts from one bus over the raw line list.
inline std::map<BusId, int> hops_from(const Grid& grid, BusId source) {
  std::map<BusId, int> dist{{source, 0}};
  std::deque<BusId> queue{source};
  while (!queue.empty()) {
    const BusId at = queue.front();
    queue.pop_front();
    for (const Line& l : grid.lines()) {
      if (!l.in_service) continue;
      BusId other;
      if (l.from_bus == at) other = l.to_bus;
      else if (l.to_bus == at) other = l.from_bus;
      else continue;
      if (dist.emplace(other, dist[at] + 1).second) queue.push_back(other);
    }
  }
  return dist;
}

// ---------------------------------------------------------------------------
// Gauss-Seidel power flow with a frequency unknown
// ---------------------------------------------------------------------------

struct OracleResult {
  std::map<BusId, BusVoltage> voltages;
  double delta_f = 0.0;
  int sweeps = 0;
};

// Fixed-point solution of the same steady state as solve_dpf. The lowest-id
// generator bus is held at angle zero; every other bus is updated by
// Gauss-Seidel and the frequency is corrected from the power still missing
// at the reference bus.
inline OracleResult gauss_seidel_dpf(const Grid& grid, const SystemState& state, double tol = 1e-13,
                                     int max_sweeps = 2'000'000) {
  using cd = std::complex<double>;
  const std::vector<BusId> buses(state.energized_buses.begin(), state.energized_buses.end());
  const std::size_t n = buses.size();
  std::map<BusId, std::size_t> at;
  for (std::size_t i = 0; i < n; ++i) at[buses[i]] = i;
  const double base = grid.base_mva();

  std::vector<std::vector<cd>> y(n, std::vector<cd>(n, 0.0));
  for (const Line& l : grid.lines()) {
    if (!l.in_service || !at.contains(l.from_bus) || !at.contains(l.to_bus)) continue;
    const std::size_t f = at[l.from_bus], t = at[l.to_bus];
    const cd series = 1.0 / cd(l.resistance, l.reactance);
    const cd half = cd(0.0, l.shunt_susceptance / 2);
    y[f][f] += series + half;
    y[t][t] += series + half;
    y[f][t] -= series;
    y[t][f] -= series;
  }

  std::vector<double> pg(n, 0), kg(n, 0), pl(n, 0), ql(n, 0), klp(n, 0), klq(n, 0);
  std::vector<bool> pv(n, false);
  double k_total = 0.0;
  for (const auto& [id, d] : state.online_units) {
    const GeneratorUnit& g = grid.generator(id);
    const std::size_t i = at.at(g.bus);
    pv[i] = true;
    pg[i] += d.p / base;
    kg[i] += g.droop_k / base;
    k_total += g.droop_k / base;
  }
  for (const auto& [id, d] : state.restored_loads) {
    const LoadPoint& l = grid.load(id);
    const std::size_t i = at.at(l.bus);
    pl[i] += d.p / base;
    ql[i] += d.q / base;
    klp[i] += l.k_lp / base;
    klq[i] += l.k_lq / base;
    k_total += l.k_lp / base;
  }
  std::size_t ref = 0;
  while (!pv[ref]) ++ref;

  std::vector<cd> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = grid.bus(buses[i]).nominal_voltage;
  double df = 0.0;

  auto current = [&](std::size_t i) {
    cd sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += y[i][k] * v[k];
    return sum;
  };

  OracleResult out;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == ref) continue;
      const double p = pg[i] - kg[i] * df - (pl[i] + klp[i] * df);
      double q;
      if (pv[i]) {
        q = -std::imag(std::conj(v[i]) * current(i));
      } else {
        q = -(ql[i] - klq[i] * df);
      }
      cd others = current(i) - y[i][i] * v[i];
      cd next = (cd(p, -q) / std::conj(v[i]) - others) / y[i][i];
      if (pv[i]) next *= grid.bus(buses[i]).nominal_voltage / std::abs(next);
      change = std::max(change, std::abs(next - v[i]));
      v[i] = next;
    }
    const double p_ref_calc = std::real(v[ref] * std::conj(current(ref)));
    const double p_ref_target = pg[ref] - kg[ref] * df - (pl[ref] + klp[ref] * df);
    const double step = (p_ref_target - p_ref_calc) / k_total;
    df += step;
    change = std::max(change, std::abs(step));
    out.sweeps = sweep + 1;
    if (change < tol) break;
  }
  if (out.sweeps == max_sweeps) throw std::runtime_error("Gauss-Seidel oracle did not converge");
  for (std::size_t i = 0; i < n; ++i) out.voltages[buses[i]] = {std::abs(v[i]), std::arg(v[i])};
  out.delta_f = df;
  return out;
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

// A small energized island with one or two droop units and a few loads,
// dispatched near balance.
struct DpfInstance {
  Grid grid;
  SystemState state;
};

inline DpfInstance random_dpf_instance(std::mt19937_64& rng, int max_buses = 5) {
  std::uniform_int_distribution<int> n_dist(2, max_buses);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = n_dist(rng);

  std::vector<Bus> buses;
  for (int i = 1; i <= n; ++i) buses.push_back(bus(i, 0.98 + 0.04 * u(rng)));
  std::vector<Line> lines;
  for (int i = 2; i <= n; ++i) {
    const int parent = 1 + static_cast<int>(u(rng) * (i - 1));
    lines.push_back(line(parent, i, 0.002 + 0.01 * u(rng), 0.02 + 0.05 * u(rng), 0.02 * u(rng)));
  }
  if (n >= 4 && u(rng) < 0.5) lines.push_back(line(1, n, 0.005, 0.04 + 0.03 * u(rng), 0.0));

  std::vector<GeneratorUnit> units;
  units.push_back(thermal(1, 1, 200, 10 + 60 * u(rng)));
  if (n >= 3 && u(rng) < 0.6) units.push_back(thermal(2, 2 + static_cast<int>(u(rng) * (n - 1)), 200, 10 + 60 * u(rng)));

  std::vector<LoadPoint> loads;
  double total = 0.0;
  for (int i = 1; i <= n; ++i) {
    if (i > 1 && u(rng) < 0.3) continue;
    const double p = 5 + 25 * u(rng);
    total += p;
    loads.push_back(load(i, i, p, (u(rng) - 0.2) * 0.5 * p, 0.5, p * (0.01 + 0.02 * u(rng)),
                         p * 0.02 * u(rng)));
  }

  Grid grid(std::move(buses), std::move(lines), units, loads);
  SystemState state;
  for (const Bus& b : grid.buses()) state.energized_buses.insert(b.id);
  const double scheduled = total + (u(rng) - 0.5) * 20.0;
  for (const GeneratorUnit& g : grid.generators())
    state.online_units[g.id] = {scheduled / static_cast<double>(grid.generators().size()), 0.0};
  for (const LoadPoint& l : grid.loads()) state.restored_loads[l.id] = {l.p, l.q};
  return {std::move(grid), std::move(state)};
}

// Restoration instance: a meshed network with one or two black-start units,
// up to two crankable thermal units and `n_loads` loads.
inline Grid random_restoration_grid(std::mt19937_64& rng, int n_loads) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = std::max(4, n_loads + 2);
  std::vector<Bus> buses;
  for (int i = 1; i <= n; ++i) buses.push_back(bus(i));
  std::vector<Line> lines;
  for (int i = 2; i <= n; ++i) {
    const int parent = std::max(1, i - 1 - static_cast<int>(u(rng) * 2));
    lines.push_back(line(parent, i, 0.001 + 0.003 * u(rng), 0.01 + 0.02 * u(rng)));
  }
  if (u(rng) < 0.5) lines.push_back(line(1, n, 0.002, 0.02));

  std::vector<GeneratorUnit> units;
  units.push_back(black_start(1, 1, 30 + 40 * u(rng), 60 + 40 * u(rng)));
  if (u(rng) < 0.4) units.push_back(black_start(2, n, 20 + 20 * u(rng), 40 + 20 * u(rng)));
  const int thermals = static_cast<int>(u(rng) * 3);
  for (int k = 0; k < thermals; ++k) {
    const int at = 2 + static_cast<int>(u(rng) * (n - 2));
    units.push_back(thermal(10 + k, at, 40 + 60 * u(rng), 40 + 40 * u(rng), 1 + 3 * u(rng)));
  }

  std::vector<LoadPoint> loads;
  for (int k = 1; k <= n_loads; ++k) {
    const int at = 1 + static_cast<int>(u(rng) * n);
    const double p = 4 + 20 * u(rng);
    const double alpha = std::round(u(rng) * 10) / 10;
    loads.push_back(load(k, at, p, 0.3 * p * u(rng), alpha, p * (0.01 + 0.01 * u(rng)), p * 0.01 * u(rng)));
  }
  return Grid(std::move(buses), std::move(lines), std::move(units), std::move(loads));
}

// Convex polygon from sorted random angles on an ellipse, shifted into the
// first quadrant.
inline ChpRegion random_region(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int k = 3 + static_cast<int>(u(rng) * 8);
  std::vector<double> angles;
  for (int i = 0; i < k; ++i) angles.push_back(2 * std::numbers::pi * u(rng));
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-3; }),
               angles.end());
  while (angles.size() < 3) {
    angles.push_back(angles.back() + 2.0);
    std::sort(angles.begin(), angles.end());
  }
  const double rx = 10 + 90 * u(rng), ry = 10 + 90 * u(rng);
  const double cx = rx + 100 * u(rng), cy = ry + 100 * u(rng);
  ChpRegion region;
  for (double a : angles) region.vertices.emplace_back(cx + rx * std::cos(a), cy + ry * std::sin(a));
  if (u(rng) < 0.5) std::reverse(region.vertices.begin(), region.vertices.end());
  return region;
}

// Point-in-polygon by the sign of the cross product against every edge.
inline bool half_plane_inside(const ChpRegion& region, double p, double h) {
  const auto& v = region.vertices;
  bool all_left = true, all_right = true;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    const double c = (b.x() - a.x()) * (h - a.y()) - (b.y() - a.y()) * (p - a.x());
    if (c < 0) all_left = false;
    if (c > 0) all_right = false;
  }
  return all_left || all_right;
}

}  // namespace support

#endif  // GRIDRESTORE_TESTS_SUPPORT_HPP

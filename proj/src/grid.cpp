#include "gridrestore/grid.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>

namespace gridrestore {

namespace {

std::string bus_name(BusId id) { return "bus " + std::to_string(id.value); }

// Breadth-first hop counts from `source` to every bus (-1 when unreachable).
std::vector<int> bfs_hops(const Grid& grid, BusId source) {
  std::vector<int> hops(grid.buses().size(), -1);
  std::deque<BusId> queue{source};
  hops[grid.bus_index(source)] = 0;
  while (!queue.empty()) {
    const BusId at = queue.front();
    queue.pop_front();
    const int next = hops[grid.bus_index(at)] + 1;
    for (BusId n : grid.neighbors(at)) {
      int& h = hops[grid.bus_index(n)];
      if (h < 0) {
        h = next;
        queue.push_back(n);
      }
    }
  }
  return hops;
}

}  // namespace

Grid::Grid(std::vector<Bus> buses, std::vector<Line> lines, std::vector<GeneratorUnit> generators,
           std::vector<LoadPoint> loads, double base_mva)
    : base_mva_(base_mva),
      buses_(std::move(buses)),
      lines_(std::move(lines)),
      generators_(std::move(generators)),
      loads_(std::move(loads)) {
  if (!(base_mva_ > 0)) throw InvalidModel("base_mva must be positive");
  for (std::size_t i = 0; i < buses_.size(); ++i) {
    const Bus& b = buses_[i];
    if (!bus_index_.emplace(b.id, i).second) throw InvalidModel("duplicate " + bus_name(b.id));
    if (b.nominal_voltage < 0.9 || b.nominal_voltage > 1.1)
      throw InvalidModel(bus_name(b.id) + ": nominal voltage outside [0.9, 1.1]");
  }
  adjacency_.resize(buses_.size());
  for (const Line& l : lines_) {
    const std::string which =
        "line " + std::to_string(l.from_bus.value) + "-" + std::to_string(l.to_bus.value);
    if (!has_bus(l.from_bus) || !has_bus(l.to_bus))
      throw InvalidModel(which + " references a missing bus");
    if (l.from_bus == l.to_bus) throw InvalidModel(which + " is a self-loop");
    if (l.reactance == 0) throw InvalidModel(which + " has zero reactance");
    if (!l.in_service) continue;
    adjacency_[bus_index_.at(l.from_bus)].push_back(l.to_bus);
    adjacency_[bus_index_.at(l.to_bus)].push_back(l.from_bus);
  }
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    const GeneratorUnit& g = generators_[i];
    if (!unit_index_.emplace(g.id, i).second)
      throw InvalidModel("duplicate generator " + std::to_string(g.id.value));
    if (!has_bus(g.bus))
      throw InvalidModel("generator " + std::to_string(g.id.value) + " references a missing bus");
    validate(g);
  }
  for (std::size_t i = 0; i < loads_.size(); ++i) {
    const LoadPoint& l = loads_[i];
    const std::string who = "load " + std::to_string(l.id.value);
    if (!load_index_.emplace(l.id, i).second) throw InvalidModel("duplicate " + who);
    if (!has_bus(l.bus)) throw InvalidModel(who + " references a missing bus");
    if (l.alpha < 0 || l.alpha > 1) throw InvalidModel(who + ": importance outside [0, 1]");
    if (l.p < 0) throw InvalidModel(who + ": negative active demand");
    if (l.k_lp < 0 || l.k_lq < 0) throw InvalidModel(who + ": negative frequency coefficient");
  }
}

std::size_t Grid::bus_index(BusId id) const {
  const auto it = bus_index_.find(id);
  if (it == bus_index_.end()) throw UnknownBus(bus_name(id) + " does not exist");
  return it->second;
}

const GeneratorUnit& Grid::generator(UnitId id) const {
  const auto it = unit_index_.find(id);
  if (it == unit_index_.end()) throw std::out_of_range("no generator " + std::to_string(id.value));
  return generators_[it->second];
}

const LoadPoint& Grid::load(LoadId id) const {
  const auto it = load_index_.find(id);
  if (it == load_index_.end()) throw std::out_of_range("no load " + std::to_string(id.value));
  return loads_[it->second];
}

void check_connected(const Grid& grid) {
  if (grid.buses().empty()) return;
  const auto hops = bfs_hops(grid, grid.buses().front().id);
  for (std::size_t i = 0; i < hops.size(); ++i)
    if (hops[i] < 0)
      throw InvalidModel("network is not connected: " + bus_name(grid.buses()[i].id) +
                         " is isolated from " + bus_name(grid.buses().front().id));
}

std::optional<int> hop_distance(const Grid& grid, BusId from_bus, BusId to_bus) {
  const std::size_t target = grid.bus_index(to_bus);
  const int h = bfs_hops(grid, from_bus)[target];
  if (h < 0) return std::nullopt;
  return h;
}

std::optional<int> distance_to_set(const Grid& grid, BusId from_bus, const std::set<BusId>& set) {
  const auto hops = bfs_hops(grid, from_bus);
  std::optional<int> best;
  for (BusId b : set) {
    const int h = hops[grid.bus_index(b)];
    if (h >= 0 && (!best || h < *best)) best = h;
  }
  return best;
}

int load_distance(const Grid& grid, BusId load_bus, const std::set<BusId>& black_start_buses) {
  if (black_start_buses.empty()) throw std::invalid_argument("no black-start buses given");
  const auto d = distance_to_set(grid, load_bus, black_start_buses);
  if (!d) throw Unreachable(bus_name(load_bus) + " cannot reach any black-start bus");
  return std::max(1, *d);
}

std::vector<BusId> energization_path(const Grid& grid, const std::set<BusId>& energized,
                                     BusId target_bus) {
  if (energized.empty()) throw std::invalid_argument("energization_path needs a live bus");
  const auto hops = bfs_hops(grid, target_bus);
  if (energized.contains(target_bus)) return {};

  auto hop = [&](BusId b) { return hops[grid.bus_index(b)]; };
  int nearest = -1;
  for (BusId b : energized) {
    const int h = hop(b);
    if (h >= 0 && (nearest < 0 || h < nearest)) nearest = h;
  }
  if (nearest < 0) throw Unreachable(bus_name(target_bus) + " cannot be reached from live buses");

  // First switched bus: lowest id adjacent to any nearest live bus.
  std::optional<BusId> step;
  for (BusId b : energized) {
    if (hop(b) != nearest) continue;
    for (BusId n : grid.neighbors(b))
      if (hop(n) == nearest - 1 && (!step || n < *step)) step = n;
  }
  std::vector<BusId> path{*step};
  while (path.back() != target_bus) {
    const int want = hop(path.back()) - 1;
    for (BusId n : grid.neighbors(path.back())) {
      if (hop(n) == want) {
        path.push_back(n);  // neighbours are sorted, so this is the lowest id
        break;
      }
    }
  }
  return path;
}

}  // namespace gridrestore

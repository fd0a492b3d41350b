#ifndef GRIDRESTORE_GRID_HPP
#define GRIDRESTORE_GRID_HPP

#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <vector>

#include "gridrestore/ids.hpp"
#include "gridrestore/load.hpp"
#include "gridrestore/resources.hpp"

namespace gridrestore {

struct Bus {
  BusId id;
  double nominal_voltage = 1.0;  // per unit
  bool energized = false;        // status in the case as loaded; planning tracks it separately
};

struct Line {
  BusId from_bus;
  BusId to_bus;
  double resistance = 0.0;  // per unit on the system base
  double reactance = 0.0;
  double shunt_susceptance = 0.0;  // total line charging
  bool in_service = true;
};

/// Immutable network: buses, lines, generating units and loads, plus the
/// adjacency used by the topology queries. Element order is preserved as
/// given; lookups by id are O(1).
class Grid {
 public:
  Grid() = default;

  /// Throws InvalidModel when an element invariant or cross-reference fails.
  /// Connectivity is not required here (see check_connected).
  Grid(std::vector<Bus> buses, std::vector<Line> lines, std::vector<GeneratorUnit> generators,
       std::vector<LoadPoint> loads, double base_mva = 100.0);

  double base_mva() const { return base_mva_; }
  std::span<const Bus> buses() const { return buses_; }
  std::span<const Line> lines() const { return lines_; }
  std::span<const GeneratorUnit> generators() const { return generators_; }
  std::span<const LoadPoint> loads() const { return loads_; }

  bool has_bus(BusId id) const { return bus_index_.contains(id); }
  /// Throws UnknownBus.
  std::size_t bus_index(BusId id) const;
  const Bus& bus(BusId id) const { return buses_[bus_index(id)]; }
  const GeneratorUnit& generator(UnitId id) const;
  const LoadPoint& load(LoadId id) const;

  /// In-service neighbours of a bus, ascending by bus id.
  std::span<const BusId> neighbors(BusId id) const { return adjacency_[bus_index(id)]; }

 private:
  double base_mva_ = 100.0;
  std::vector<Bus> buses_;
  std::vector<Line> lines_;
  std::vector<GeneratorUnit> generators_;
  std::vector<LoadPoint> loads_;
  std::unordered_map<BusId, std::size_t> bus_index_;
  std::unordered_map<UnitId, std::size_t> unit_index_;
  std::unordered_map<LoadId, std::size_t> load_index_;
  std::vector<std::vector<BusId>> adjacency_;
};

/// Throws InvalidModel if the in-service graph is not connected.
void check_connected(const Grid& grid);

/// Edge count of the shortest in-service path, or nullopt when no path
/// exists. Throws UnknownBus.
std::optional<int> hop_distance(const Grid& grid, BusId from_bus, BusId to_bus);

/// Distance of a load bus to the nearest black-start bus, clamped below at 1.
/// Throws Unreachable if no black-start bus can be reached.
int load_distance(const Grid& grid, BusId load_bus, const std::set<BusId>& black_start_buses);

/// Hop distance from a bus to the nearest bus of a set (0 when inside it).
std::optional<int> distance_to_set(const Grid& grid, BusId from_bus, const std::set<BusId>& set);

/// De-energized buses to switch on, in order, so that `target_bus` joins the
/// energized subgraph. The target itself is the last entry unless it is
/// already energized, in which case the result is empty. Equal-length routes
/// are resolved by always stepping to the lowest bus id. Throws Unreachable.
std::vector<BusId> energization_path(const Grid& grid, const std::set<BusId>& energized,
                                     BusId target_bus);

}  // namespace gridrestore

#endif  // GRIDRESTORE_GRID_HPP

#ifndef GRIDRESTORE_PLANNER_HPP
#define GRIDRESTORE_PLANNER_HPP

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gridrestore/dpf.hpp"
#include "gridrestore/grid.hpp"

namespace gridrestore {

/// Blend between load importance (omega = 1) and proximity to the
/// black-start resources (omega = 0).
struct ScoreWeights {
  double omega = 1.0;
};

/// omega * alpha * C + (1 - omega) * C / d, with C the load's active demand.
/// Throws std::invalid_argument when d < 1 or omega is outside [0, 1].
double compound_score(const LoadPoint& load, int d, ScoreWeights weights);

struct Candidate {
  LoadId load;
  BusId bus;
  double score = 0.0;
  double demand_mw = 0.0;  // worst-case active demand
};

/// Highest-score candidate whose demand fits in `available_mw`; equal scores
/// go to the lower bus id, then the lower load id. nullopt when nothing fits.
std::optional<LoadId> greedy_select(std::span<const Candidate> candidates, double available_mw);

struct PlannerConfig {
  double switch_minutes = 5.0;
  double fluctuation = kDefaultFluctuation;
  bool rank_per_mw = false;  // rank by score per worst-case MW instead of raw score
  StepLimits limits;
  DpfOptions dpf;
};

/// Online capability at the state's time minus the served worst-case demand.
double available_capacity(const Grid& grid, const SystemState& state);

/// Next non-black-start unit to crank: among offline units whose cranking
/// power fits the headroom and whose bus is reachable, the one nearest the
/// energized subgraph (ties to the lowest unit id).
std::optional<UnitId> start_next_unit(const Grid& grid, const SystemState& state);

enum class ActionKind { BlackStart, Energize, PickUp, StartUnit };

std::string_view to_string(ActionKind kind);

struct Diagnostics {
  double delta_f = 0.0;        // Hz
  double min_dv = 0.0;         // most negative voltage deviation, pu
  double max_dv = 0.0;         // most positive voltage deviation, pu
};

struct RestorationAction {
  ActionKind kind = ActionKind::Energize;
  BusId bus;                   // where the action happens
  std::optional<UnitId> unit;  // BlackStart, StartUnit
  std::optional<LoadId> load;  // PickUp
  double t_minutes = 0.0;      // start time since blackout
  std::optional<Diagnostics> diagnostics;
  SystemState state;           // system as solved for the diagnostics
};

struct UnservedLoad {
  LoadId load;
  std::string reason;
};

struct RejectedPickUp {
  LoadId load;
  double t_minutes = 0.0;
  Rejection rejection;
};

/// One greedy decision: what was on offer and what was taken.
struct SelectionStep {
  double t_minutes = 0.0;
  double available_mw = 0.0;
  std::vector<Candidate> candidates;
  std::optional<LoadId> chosen;
};

struct RestorationPlan {
  double omega = 0.0;
  std::vector<RestorationAction> actions;
  double total_minutes = 0.0;
  double total_score = 0.0;  // compound score of every restored load
  std::vector<UnservedLoad> unserved_loads;
  std::vector<RejectedPickUp> rejections;
  std::vector<SelectionStep> trace;
};

/// Incremental restoration state shared by the greedy planner and the
/// exhaustive oracle. Copies are independent.
class RestorationSession {
 public:
  /// Throws NoBlackStart.
  RestorationSession(const Grid& grid, ScoreWeights weights, PlannerConfig config);

  /// Starts every self-starting unit and ties their buses into one island.
  void black_start();

  const SystemState& state() const { return state_; }
  const RestorationPlan& plan() const { return plan_; }
  RestorationPlan&& take_plan() &&;

  std::span<const LoadId> pending() const { return pending_; }
  bool reachable(LoadId id) const { return distance_.contains(id); }
  double score(LoadId id) const { return score_.at(id); }
  double available_mw() const { return available_capacity(*grid_, state_); }
  Candidate candidate(LoadId id) const;

  /// Energizes the route to the load's bus and connects the load at its
  /// worst-case demand, validated by the power flow. Commits on acceptance;
  /// on rejection nothing changes.
  StepCheck try_pick_up(LoadId id);

  /// Energizes the route to the unit, cranks it, waits out its startup time
  /// and brings it online.
  void start_unit(UnitId id);

  /// Records remaining loads as unserved.
  void finish(const std::map<LoadId, std::string>& reasons);

 private:
  void emit(ActionKind kind, BusId bus, std::optional<UnitId> unit, std::optional<LoadId> load,
            const SystemState& solved, double t);
  void rebalance(SystemState& state) const;
  void energize_route(SystemState& state, std::span<const BusId> route, bool record);

  const Grid* grid_;
  ScoreWeights weights_;
  PlannerConfig config_;
  SystemState state_;
  RestorationPlan plan_;
  std::vector<LoadId> pending_;
  std::map<LoadId, int> distance_;
  std::map<LoadId, double> score_;
};

/// Greedy restoration sequence. Throws NoBlackStart.
RestorationPlan plan_restoration(const Grid& grid, ScoreWeights weights, const PlannerConfig& config = {});

/// One independent plan per omega, ordered by omega.
std::vector<std::pair<double, RestorationPlan>> sweep_omega(const Grid& grid, std::span<const double> omegas,
                                                            const PlannerConfig& config = {});

/// Exhaustive search over pick-up orders and unit starts for the plan with
/// the largest total compound score. Test oracle; throws TooLarge when the
/// grid has more than `max_loads` loads.
RestorationPlan oracle_best_sequence(const Grid& grid, ScoreWeights weights, const PlannerConfig& config,
                                     std::size_t max_loads = 8);

}  // namespace gridrestore

#endif  // GRIDRESTORE_PLANNER_HPP

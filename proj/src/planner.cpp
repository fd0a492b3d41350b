#include "gridrestore/planner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <future>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gridrestore {

namespace {

// Buses of the energized island that contains `seed`.
std::set<BusId> island_of(const Grid& grid, const std::set<BusId>& energized, BusId seed) {
  std::set<BusId> island{seed};
  std::deque<BusId> queue{seed};
  while (!queue.empty()) {
    const BusId at = queue.front();
    queue.pop_front();
    for (BusId n : grid.neighbors(at))
      if (energized.contains(n) && island.insert(n).second) queue.push_back(n);
  }
  return island;
}

// Strict weak order used everywhere a ranking must be deterministic.
bool ranks_before(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.bus != b.bus) return a.bus < b.bus;
  return a.load < b.load;
}

std::string describe(const Rejection& r) { return std::string(to_string(r.constraint)) + ": " + r.detail; }

}  // namespace

double compound_score(const LoadPoint& load, int d, ScoreWeights weights) {
  if (d < 1) throw std::invalid_argument("load distance must be at least 1");
  if (!(weights.omega >= 0.0 && weights.omega <= 1.0))
    throw std::invalid_argument("omega must lie in [0, 1]");
  const double w = weights.omega;
  return w * load.alpha * load.p + (1.0 - w) * load.p / d;
}

std::optional<LoadId> greedy_select(std::span<const Candidate> candidates, double available_mw) {
  const Candidate* best = nullptr;
  for (const Candidate& c : candidates) {
    if (c.demand_mw > available_mw) continue;
    if (!best || ranks_before(c, *best)) best = &c;
  }
  if (!best) return std::nullopt;
  return best->load;
}

double available_capacity(const Grid& grid, const SystemState& state) {
  double capacity = 0.0;
  for (const auto& [id, _] : state.online_units)
    capacity += available_output(grid.generator(id), state.t_minutes);
  for (const auto& [_, demand] : state.restored_loads) capacity -= demand.p;
  return capacity;
}

std::optional<UnitId> start_next_unit(const Grid& grid, const SystemState& state) {
  const double headroom = available_capacity(grid, state);
  std::optional<UnitId> best;
  int best_hops = std::numeric_limits<int>::max();
  for (const GeneratorUnit& unit : grid.generators()) {
    if (unit.black_start || state.online_units.contains(unit.id)) continue;
    if (unit.cranking_power > headroom) continue;
    const auto hops = distance_to_set(grid, unit.bus, state.energized_buses);
    if (!hops) continue;
    if (*hops < best_hops || (*hops == best_hops && unit.id < *best)) {
      best = unit.id;
      best_hops = *hops;
    }
  }
  return best;
}

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::BlackStart:
      return "BlackStart";
    case ActionKind::Energize:
      return "Energize";
    case ActionKind::PickUp:
      return "PickUp";
    case ActionKind::StartUnit:
      return "StartUnit";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// RestorationSession
// ---------------------------------------------------------------------------

RestorationSession::RestorationSession(const Grid& grid, ScoreWeights weights, PlannerConfig config)
    : grid_(&grid), weights_(weights), config_(config) {
  if (!(weights.omega >= 0.0 && weights.omega <= 1.0))
    throw std::invalid_argument("omega must lie in [0, 1]");
  if (!(config.fluctuation >= 0.0 && config.fluctuation <= 1.0))
    throw std::invalid_argument("fluctuation fraction must lie in [0, 1]");
  std::set<BusId> black_start_buses;
  for (const GeneratorUnit& unit : grid.generators())
    if (unit.black_start) black_start_buses.insert(unit.bus);
  if (black_start_buses.empty()) throw NoBlackStart("the case has no self-starting unit");

  plan_.omega = weights.omega;
  for (const LoadPoint& load : grid.loads()) {
    pending_.push_back(load.id);
    try {
      const int d = load_distance(grid, load.bus, black_start_buses);
      distance_[load.id] = d;
      score_[load.id] = compound_score(load, d, weights);
    } catch (const Unreachable&) {
      // stays pending and is reported as unserved
    }
  }
}

RestorationPlan&& RestorationSession::take_plan() && { return std::move(plan_); }

Candidate RestorationSession::candidate(LoadId id) const {
  const LoadPoint& load = grid_->load(id);
  const Demand demand = worst_case_fluctuation(load.p, load.q, config_.fluctuation);
  double s = score_.at(id);
  if (config_.rank_per_mw) s = demand.p > 0 ? s / demand.p : std::numeric_limits<double>::infinity();
  return {id, load.bus, s, demand.p};
}

void RestorationSession::emit(ActionKind kind, BusId bus, std::optional<UnitId> unit,
                              std::optional<LoadId> load, const SystemState& solved, double t) {
  RestorationAction action;
  action.kind = kind;
  action.bus = bus;
  action.unit = unit;
  action.load = load;
  action.t_minutes = t;
  action.state = solved;
  try {
    const DpfSolution sol = solve_dpf(*grid_, solved, config_.dpf);
    Diagnostics d;
    d.delta_f = sol.delta_f;
    d.min_dv = std::numeric_limits<double>::max();
    d.max_dv = std::numeric_limits<double>::lowest();
    for (const auto& [b, v] : sol.voltages) {
      const double dv = v.magnitude - grid_->bus(b).nominal_voltage;
      d.min_dv = std::min(d.min_dv, dv);
      d.max_dv = std::max(d.max_dv, dv);
    }
    action.diagnostics = d;
    action.state.voltages = sol.voltages;
    action.state.delta_f = sol.delta_f;
    for (const auto& [id, out] : sol.unit_output) action.state.online_units[id].q = out.q;
  } catch (const Error&) {
    // Split islands during black start, or no droop yet: no diagnostics.
  }
  plan_.actions.push_back(std::move(action));
  state_.voltages = plan_.actions.back().state.voltages;
  state_.delta_f = plan_.actions.back().state.delta_f;
}

void RestorationSession::rebalance(SystemState& state) const {
  std::vector<std::pair<UnitId, double>> caps;
  for (const auto& [id, _] : state.online_units)
    caps.emplace_back(id, available_output(grid_->generator(id), state.t_minutes));

  auto allocate = [&](double total) {
    // Share `total` in proportion to capability, clamped to [p_min, cap].
    std::map<UnitId, double> fixed;
    for (;;) {
      double rest = total, free_cap = 0.0;
      for (const auto& [id, cap] : caps) {
        if (fixed.contains(id)) rest -= fixed[id];
        else free_cap += cap;
      }
      bool clamped = false;
      for (const auto& [id, cap] : caps) {
        if (fixed.contains(id)) continue;
        const GeneratorUnit& unit = grid_->generator(id);
        const double share = free_cap > 0 ? rest * cap / free_cap : 0.0;
        if (share < unit.p_min || share > cap) {
          fixed[id] = std::clamp(share, unit.p_min, std::max(unit.p_min, cap));
          clamped = true;
        } else {
          state.online_units[id].p = share;
        }
      }
      if (!clamped) break;
    }
    for (const auto& [id, p] : fixed) state.online_units[id].p = p;
  };

  double total = 0.0;
  for (const auto& [_, demand] : state.restored_loads) total += demand.p;
  allocate(total);
  for (int pass = 0; pass < 20; ++pass) {
    DpfSolution sol;
    try {
      sol = solve_dpf(*grid_, state, config_.dpf);
    } catch (const Error&) {
      return;
    }
    if (std::abs(sol.p_acc) < 1e-9) return;
    total -= sol.p_acc;
    allocate(total);
  }
}

void RestorationSession::energize_route(SystemState& state, std::span<const BusId> route, bool record) {
  for (BusId bus : route) {
    if (state.energized_buses.contains(bus)) continue;
    const double t = state.t_minutes;
    state.energized_buses.insert(bus);
    state.t_minutes += config_.switch_minutes;
    rebalance(state);
    if (record) emit(ActionKind::Energize, bus, std::nullopt, std::nullopt, state, t);
  }
}

void RestorationSession::black_start() {
  std::vector<const GeneratorUnit*> units;
  for (const GeneratorUnit& unit : grid_->generators())
    if (unit.black_start) units.push_back(&unit);
  std::sort(units.begin(), units.end(), [](auto* a, auto* b) { return a->id < b->id; });

  for (const GeneratorUnit* unit : units) {
    state_.online_units[unit->id] = {};
    state_.energized_buses.insert(unit->bus);
    emit(ActionKind::BlackStart, unit->bus, unit->id, std::nullopt, state_, state_.t_minutes);
  }
  // Synchronize: grow the first unit's island until every black-start bus
  // belongs to it.
  for (const GeneratorUnit* unit : units) {
    const auto main = island_of(*grid_, state_.energized_buses, units.front()->bus);
    if (main.contains(unit->bus)) continue;
    const auto route = energization_path(*grid_, main, unit->bus);
    energize_route(state_, route, true);
  }
  rebalance(state_);
}

StepCheck RestorationSession::try_pick_up(LoadId id) {
  const LoadPoint& load = grid_->load(id);
  const auto route = energization_path(*grid_, state_.energized_buses, load.bus);

  SystemState trial = state_;
  energize_route(trial, route, false);
  const double t_pick = trial.t_minutes;
  const Demand demand = worst_case_fluctuation(load.p, load.q, config_.fluctuation);
  trial.restored_loads[id] = demand;

  StepCheck check;
  try {
    const DpfSolution sol = solve_dpf(*grid_, trial, config_.dpf);
    check = check_step(*grid_, trial, sol, config_.limits);
  } catch (const Diverged& e) {
    check.rejection = Rejection{Constraint::Convergence, e.what()};
  }
  if (!check.accepted()) {
    plan_.rejections.push_back({id, t_pick, *check.rejection});
    return check;
  }

  energize_route(state_, route, true);
  state_.restored_loads[id] = demand;
  emit(ActionKind::PickUp, load.bus, std::nullopt, id, state_, t_pick);
  state_.t_minutes += config_.switch_minutes;
  rebalance(state_);
  plan_.total_score += score_.at(id);
  plan_.total_minutes = state_.t_minutes;
  pending_.erase(std::find(pending_.begin(), pending_.end(), id));
  return check;
}

void RestorationSession::start_unit(UnitId id) {
  const GeneratorUnit& unit = grid_->generator(id);
  const auto route = energization_path(*grid_, state_.energized_buses, unit.bus);
  energize_route(state_, route, true);

  const double t = state_.t_minutes;
  double duration = 0.0;
  try {
    duration = startup_duration(unit, t);
  } catch (const NotApplicable&) {
    // self-starting kinds come online at once
  }
  state_.online_units[id] = {};
  state_.t_minutes += duration;
  rebalance(state_);
  emit(ActionKind::StartUnit, unit.bus, id, std::nullopt, state_, t);
  plan_.total_minutes = state_.t_minutes;
}

void RestorationSession::finish(const std::map<LoadId, std::string>& reasons) {
  plan_.unserved_loads.clear();
  for (LoadId id : pending_) {
    const auto it = reasons.find(id);
    std::string reason = !reachable(id)           ? "Unreachable"
                         : it != reasons.end()    ? it->second
                                                  : "InsufficientCapacity";
    plan_.unserved_loads.push_back({id, std::move(reason)});
  }
  plan_.total_minutes = state_.t_minutes;
}

// ---------------------------------------------------------------------------
// Planning entry points
// ---------------------------------------------------------------------------

RestorationPlan plan_restoration(const Grid& grid, ScoreWeights weights, const PlannerConfig& config) {
  RestorationSession session(grid, weights, config);
  session.black_start();

  std::set<LoadId> blocked;  // rejected since the last unit start
  std::map<LoadId, std::string> reasons;
  std::vector<SelectionStep> trace;
  for (;;) {
    std::vector<Candidate> candidates;
    bool any_left = false;
    for (LoadId id : session.pending()) {
      if (!session.reachable(id)) continue;
      any_left = true;
      if (!blocked.contains(id)) candidates.push_back(session.candidate(id));
    }
    if (!any_left) break;

    SelectionStep step;
    step.t_minutes = session.state().t_minutes;
    step.available_mw = session.available_mw();
    step.candidates = candidates;
    step.chosen = greedy_select(candidates, step.available_mw);
    trace.push_back(step);

    if (step.chosen) {
      const StepCheck check = session.try_pick_up(*step.chosen);
      if (check.accepted()) {
        reasons.erase(*step.chosen);
      } else {
        blocked.insert(*step.chosen);
        reasons[*step.chosen] = describe(*check.rejection);
      }
      continue;
    }
    const auto unit = start_next_unit(grid, session.state());
    if (!unit) break;
    session.start_unit(*unit);
    blocked.clear();
  }
  session.finish(reasons);
  RestorationPlan plan = std::move(session).take_plan();
  plan.trace = std::move(trace);
  return plan;
}

std::vector<std::pair<double, RestorationPlan>> sweep_omega(const Grid& grid, std::span<const double> omegas,
                                                            const PlannerConfig& config) {
  for (double w : omegas)
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("omega must lie in [0, 1]");
  std::vector<std::future<RestorationPlan>> jobs;
  jobs.reserve(omegas.size());
  for (double w : omegas)
    jobs.push_back(std::async(std::launch::async, [&grid, &config, w] {
      return plan_restoration(grid, ScoreWeights{w}, config);
    }));
  std::vector<std::pair<double, RestorationPlan>> out;
  out.reserve(omegas.size());
  for (std::size_t i = 0; i < omegas.size(); ++i) out.emplace_back(omegas[i], jobs[i].get());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

namespace {

struct OracleSearch {
  const Grid& grid;
  double best_score = -std::numeric_limits<double>::infinity();
  std::optional<RestorationSession> best;

  void visit(const RestorationSession& s) {
    const double score = s.plan().total_score;
    if (score > best_score + 1e-12) {
      best_score = score;
      best = s;
    }
    std::vector<Candidate> open;
    double bound = score;
    for (LoadId id : s.pending()) {
      if (!s.reachable(id)) continue;
      bound += s.score(id);
      open.push_back(s.candidate(id));
    }
    if (open.empty() || bound <= best_score + 1e-12) return;

    std::sort(open.begin(), open.end(), ranks_before);
    const double available = s.available_mw();
    for (const Candidate& c : open) {
      if (c.demand_mw > available) continue;
      RestorationSession next = s;
      if (next.try_pick_up(c.load).accepted()) visit(next);
    }
    if (const auto unit = start_next_unit(grid, s.state())) {
      RestorationSession next = s;
      next.start_unit(*unit);
      visit(next);
    }
  }
};

}  // namespace

RestorationPlan oracle_best_sequence(const Grid& grid, ScoreWeights weights, const PlannerConfig& config,
                                     std::size_t max_loads) {
  if (grid.loads().size() > max_loads)
    throw TooLarge("oracle limited to " + std::to_string(max_loads) + " loads");
  RestorationSession root(grid, weights, config);
  root.black_start();
  OracleSearch search{grid, -std::numeric_limits<double>::infinity(), std::nullopt};
  search.visit(root);
  RestorationSession best = std::move(*search.best);
  best.finish({});
  RestorationPlan plan = std::move(best).take_plan();
  plan.rejections.clear();
  return plan;
}

}  // namespace gridrestore

#include "gridrestore/dpf.hpp"

#include <Eigen/LU>

#include <cmath>
#include <complex>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace gridrestore {

double FrequencyCoefficients::total_active() const {
  double total = 0.0;
  for (const auto& [_, k] : k_g) total += k;
  for (const auto& [_, k] : k_lp) total += k;
  return total;
}

FrequencyCoefficients frequency_coefficients(const Grid& grid, const SystemState& state) {
  FrequencyCoefficients c;
  for (const auto& [id, _] : state.online_units) c.k_g[id] = grid.generator(id).droop_k;
  for (const auto& [id, _] : state.restored_loads) {
    const LoadPoint& load = grid.load(id);
    c.k_lp[id] = load.k_lp;
    c.k_lq[id] = load.k_lq;
  }
  return c;
}

// ---------------------------------------------------------------------------
// PowerFlowModel
// ---------------------------------------------------------------------------

PowerFlowModel::PowerFlowModel(const Grid& grid, const SystemState& state)
    : buses_(state.energized_buses.begin(), state.energized_buses.end()) {
  const auto n = static_cast<Eigen::Index>(buses_.size());
  if (n == 0) throw NoFrequencyAnchor("no energized bus");
  std::unordered_map<BusId, Eigen::Index> local;
  for (Eigen::Index i = 0; i < n; ++i) local.emplace(buses_[i], i);
  auto index_of = [&](BusId b, const std::string& what) {
    const auto it = local.find(b);
    if (it == local.end())
      throw InvalidModel(what + " sits on de-energized bus " + std::to_string(b.value));
    return it->second;
  };

  const double base = grid.base_mva();
  pv_.assign(n, false);
  vm_set_ = Eigen::VectorXd::Ones(n);
  p_gen_ = p_load_ = q_load_ = k_gen_ = k_lp_ = k_lq_ = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) vm_set_[i] = grid.bus(buses_[i]).nominal_voltage;

  double total_droop = 0.0;
  for (const auto& [id, dispatch] : state.online_units) {
    const GeneratorUnit& unit = grid.generator(id);
    const Eigen::Index i = index_of(unit.bus, "generator " + std::to_string(id.value));
    pv_[i] = true;
    p_gen_[i] += dispatch.p / base;
    k_gen_[i] += unit.droop_k / base;
    total_droop += unit.droop_k;
  }
  if (!(total_droop > 0)) throw NoFrequencyAnchor("no online unit provides frequency droop");
  for (const auto& [id, demand] : state.restored_loads) {
    const LoadPoint& load = grid.load(id);
    const Eigen::Index i = index_of(load.bus, "load " + std::to_string(id.value));
    p_load_[i] += demand.p / base;
    q_load_[i] += demand.q / base;
    k_lp_[i] += load.k_lp / base;
    k_lq_[i] += load.k_lq / base;
  }

  ybus_ = Eigen::MatrixXcd::Zero(n, n);
  for (const Line& line : grid.lines()) {
    if (!line.in_service) continue;
    const auto f = local.find(line.from_bus);
    const auto t = local.find(line.to_bus);
    if (f == local.end() || t == local.end()) continue;
    const std::complex<double> y = 1.0 / std::complex<double>(line.resistance, line.reactance);
    const std::complex<double> charging(0.0, line.shunt_susceptance / 2.0);
    ybus_(f->second, f->second) += y + charging;
    ybus_(t->second, t->second) += y + charging;
    ybus_(f->second, t->second) -= y;
    ybus_(t->second, f->second) -= y;
  }

  // The frequency deviation is shared, so the live buses must form one island.
  std::vector<bool> seen(n, false);
  std::deque<Eigen::Index> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    const Eigen::Index i = queue.front();
    queue.pop_front();
    for (Eigen::Index j = 0; j < n; ++j)
      if (!seen[j] && ybus_(i, j) != std::complex<double>(0.0, 0.0)) {
        seen[j] = true;
        queue.push_back(j);
      }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    if (!seen[i])
      throw InvalidModel("energized subgraph is not connected at bus " + std::to_string(buses_[i].value));

  ref_ = 0;
  while (!pv_[ref_]) ++ref_;

  theta_col_.assign(n, -1);
  vm_col_.assign(n, -1);
  q_row_.assign(n, -1);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (static_cast<std::size_t>(i) != ref_) theta_col_[i] = col++;
  Eigen::Index row = n;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!pv_[i]) {
      vm_col_[i] = col++;
      q_row_[i] = row++;
    }
  df_col_ = col++;
  n_unknowns_ = col;
}

Eigen::VectorXd PowerFlowModel::flat_start() const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_unknowns_);
  for (std::size_t i = 0; i < buses_.size(); ++i)
    if (vm_col_[i] >= 0) x[vm_col_[i]] = 1.0;
  return x;
}

void PowerFlowModel::unpack(const Eigen::VectorXd& x, Eigen::VectorXd& vm, Eigen::VectorXd& va,
                            double& delta_f) const {
  const auto n = static_cast<Eigen::Index>(buses_.size());
  vm = vm_set_;
  va = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (theta_col_[i] >= 0) va[i] = x[theta_col_[i]];
    if (vm_col_[i] >= 0) vm[i] = x[vm_col_[i]];
  }
  delta_f = x[df_col_];
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> PowerFlowModel::injections(const Eigen::VectorXd& vm,
                                                                       const Eigen::VectorXd& va) const {
  const Eigen::VectorXcd v = (vm.array() * (std::complex<double>(0, 1) * va.array()).exp()).matrix();
  const Eigen::VectorXcd s = v.array() * (ybus_ * v).conjugate().array();
  return {s.real(), s.imag()};
}

Eigen::VectorXd PowerFlowModel::mismatch(const Eigen::VectorXd& x) const {
  Eigen::VectorXd vm, va;
  double df = 0.0;
  unpack(x, vm, va, df);
  const auto [p_calc, q_calc] = injections(vm, va);
  Eigen::VectorXd f(n_unknowns_);
  const auto n = static_cast<Eigen::Index>(buses_.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    f[i] = (p_gen_[i] - k_gen_[i] * df) - (p_load_[i] + k_lp_[i] * df) - p_calc[i];
    if (q_row_[i] >= 0) f[q_row_[i]] = -(q_load_[i] - k_lq_[i] * df) - q_calc[i];
  }
  return f;
}

Eigen::MatrixXd PowerFlowModel::jacobian(const Eigen::VectorXd& x) const {
  Eigen::VectorXd vm, va;
  double df = 0.0;
  unpack(x, vm, va, df);
  const auto [p_calc, q_calc] = injections(vm, va);
  const auto n = static_cast<Eigen::Index>(buses_.size());
  const Eigen::MatrixXd g = ybus_.real();
  const Eigen::MatrixXd b = ybus_.imag();

  // Derivatives of the calculated injections; the mismatch Jacobian is their
  // negation plus the frequency column.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n_unknowns_, n_unknowns_);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index qi = q_row_[i];
    for (Eigen::Index k = 0; k < n; ++k) {
      const double t = va[i] - va[k];
      const double gc_bs = g(i, k) * std::cos(t) + b(i, k) * std::sin(t);
      const double gs_bc = g(i, k) * std::sin(t) - b(i, k) * std::cos(t);
      double dp_dtheta, dp_dv, dq_dtheta, dq_dv;
      if (i == k) {
        dp_dtheta = -q_calc[i] - b(i, i) * vm[i] * vm[i];
        dp_dv = p_calc[i] / vm[i] + g(i, i) * vm[i];
        dq_dtheta = p_calc[i] - g(i, i) * vm[i] * vm[i];
        dq_dv = q_calc[i] / vm[i] - b(i, i) * vm[i];
      } else {
        dp_dtheta = vm[i] * vm[k] * gs_bc;
        dp_dv = vm[i] * gc_bs;
        dq_dtheta = -vm[i] * vm[k] * gc_bs;
        dq_dv = vm[i] * gs_bc;
      }
      if (theta_col_[k] >= 0) {
        jac(i, theta_col_[k]) = -dp_dtheta;
        if (qi >= 0) jac(qi, theta_col_[k]) = -dq_dtheta;
      }
      if (vm_col_[k] >= 0) {
        jac(i, vm_col_[k]) = -dp_dv;
        if (qi >= 0) jac(qi, vm_col_[k]) = -dq_dv;
      }
    }
    jac(i, df_col_) = -(k_gen_[i] + k_lp_[i]);
    if (qi >= 0) jac(qi, df_col_) = k_lq_[i];
  }
  return jac;
}

// ---------------------------------------------------------------------------
// solve_dpf
// ---------------------------------------------------------------------------

DpfSolution solve_dpf(const Grid& grid, const SystemState& state, const DpfOptions& options) {
  const PowerFlowModel model(grid, state);
  Eigen::VectorXd x = model.flat_start();
  Eigen::VectorXd f = model.mismatch(x);

  int iterations = 0;
  while (f.lpNorm<Eigen::Infinity>() >= options.tolerance) {
    if (iterations == options.max_iterations || !f.allFinite())
      throw Diverged("power flow did not converge in " + std::to_string(iterations) + " iterations");
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(model.jacobian(x));
    x -= lu.solve(f);
    f = model.mismatch(x);
    ++iterations;
  }
  // One more step once inside the tolerance; it costs one factorization and
  // takes the residual to round-off.
  if (iterations > 0) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(model.jacobian(x));
    const Eigen::VectorXd polished = x - lu.solve(f);
    const Eigen::VectorXd f_polished = model.mismatch(polished);
    if (f_polished.lpNorm<Eigen::Infinity>() < f.lpNorm<Eigen::Infinity>()) {
      x = polished;
      f = f_polished;
    }
  }

  DpfSolution sol;
  sol.converged = true;
  sol.iterations = iterations;
  Eigen::VectorXd vm, va;
  model.unpack(x, vm, va, sol.delta_f);
  const auto [p_calc, q_calc] = model.injections(vm, va);
  const double base = grid.base_mva();
  const auto buses = model.buses();

  for (std::size_t i = 0; i < buses.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    sol.voltages[buses[i]] = {vm[k], va[k]};
    sol.per_bus_mismatch[buses[i]] = {f[k] * base, 0.0};
  }
  // Reactive residuals follow the active rows, one per PQ bus in bus order.
  Eigen::Index row = static_cast<Eigen::Index>(buses.size());
  for (std::size_t i = 0; i < buses.size(); ++i)
    if (!model.is_pv(i)) sol.per_bus_mismatch[buses[i]].second = f[row++] * base;

  sol.losses = p_calc.sum() * base;
  const double scheduled_gen = model.p_setpoint().sum() * base;
  const double scheduled_load = model.p_load().sum() * base;
  sol.p_acc = acceleration_power(scheduled_gen, scheduled_load, sol.losses);

  // Realized unit outputs: droop response on P, bus reactive need shared in
  // proportion to each unit's reactive range.
  std::map<BusId, std::vector<UnitId>> units_at;
  for (const auto& [id, _] : state.online_units) units_at[grid.generator(id).bus].push_back(id);
  std::unordered_map<BusId, std::size_t> local;
  for (std::size_t i = 0; i < buses.size(); ++i) local.emplace(buses[i], i);
  for (const auto& [bus, ids] : units_at) {
    const auto i = static_cast<Eigen::Index>(local.at(bus));
    const double q_bus = (q_calc[i] + model.q_load()[i] - model.k_load_q()[i] * sol.delta_f) * base;
    double q_lo = 0.0, q_range = 0.0;
    for (UnitId id : ids) {
      q_lo += grid.generator(id).q_min;
      q_range += grid.generator(id).q_max - grid.generator(id).q_min;
    }
    const double share = q_range > 0 ? (q_bus - q_lo) / q_range : 0.0;
    for (UnitId id : ids) {
      const GeneratorUnit& unit = grid.generator(id);
      Dispatch out;
      out.p = state.online_units.at(id).p - unit.droop_k * sol.delta_f;
      out.q = q_range > 0 ? unit.q_min + share * (unit.q_max - unit.q_min)
                          : q_bus / static_cast<double>(ids.size());
      sol.unit_output[id] = out;
    }
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Step screening
// ---------------------------------------------------------------------------

std::string_view to_string(Constraint c) {
  switch (c) {
    case Constraint::Frequency:
      return "FrequencyLimit";
    case Constraint::Voltage:
      return "VoltageLimit";
    case Constraint::ActivePowerLimit:
      return "ActivePowerLimit";
    case Constraint::ReactivePowerLimit:
      return "ReactivePowerLimit";
    case Constraint::Convergence:
      return "PowerFlowDiverged";
  }
  return "Unknown";
}

StepCheck check_step(const Grid& grid, const SystemState& state_after, const DpfSolution& solution,
                     const StepLimits& limits) {
  auto reject = [](Constraint c, const std::string& detail) {
    return StepCheck{Rejection{c, detail}};
  };
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
  };

  if (!solution.converged) return reject(Constraint::Convergence, "power flow not converged");
  if (!(std::abs(solution.delta_f) < limits.max_abs_delta_f_hz))
    return reject(Constraint::Frequency, "delta_f " + fmt(solution.delta_f) + " Hz");

  for (const auto& [bus, v] : solution.voltages) {
    const double deviation = v.magnitude - grid.bus(bus).nominal_voltage;
    if (!(std::abs(deviation) < limits.max_abs_voltage_deviation))
      return reject(Constraint::Voltage,
                    "bus " + std::to_string(bus.value) + " deviation " + fmt(deviation) + " pu");
  }

  constexpr double slack = 1e-9;
  for (const auto& [id, out] : solution.unit_output) {
    const GeneratorUnit& unit = grid.generator(id);
    const double upper = available_output(unit, state_after.t_minutes);
    if (out.p < unit.p_min - slack || out.p > upper + slack)
      return reject(Constraint::ActivePowerLimit, "generator " + std::to_string(id.value) + " at " +
                                                      fmt(out.p) + " MW outside [" + fmt(unit.p_min) +
                                                      ", " + fmt(upper) + "]");
  }
  for (const auto& [id, out] : solution.unit_output) {
    const GeneratorUnit& unit = grid.generator(id);
    if (out.q < unit.q_min - slack || out.q > unit.q_max + slack)
      return reject(Constraint::ReactivePowerLimit, "generator " + std::to_string(id.value) + " at " +
                                                        fmt(out.q) + " MVar outside [" +
                                                        fmt(unit.q_min) + ", " + fmt(unit.q_max) + "]");
  }
  return {};
}

Demand worst_case_fluctuation(double load_p, double load_q, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw std::invalid_argument("fluctuation fraction must lie in [0, 1]");
  return {load_p * (1.0 + fraction), load_q * (1.0 + fraction)};
}

}  // namespace gridrestore

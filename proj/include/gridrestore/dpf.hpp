#ifndef GRIDRESTORE_DPF_HPP
#define GRIDRESTORE_DPF_HPP

#include <Eigen/Core>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gridrestore/grid.hpp"

namespace gridrestore {

struct Dispatch {
  double p = 0.0;  // active setpoint, MW (output at nominal frequency)
  double q = 0.0;  // reactive output from the last solve, MVar
};

struct Demand {
  double p = 0.0;  // MW
  double q = 0.0;  // MVar
};

struct BusVoltage {
  double magnitude = 1.0;  // per unit
  double angle = 0.0;      // radians
};

/// The restored part of the system at one point of a plan.
struct SystemState {
  std::set<BusId> energized_buses;
  std::map<UnitId, Dispatch> online_units;
  std::map<LoadId, Demand> restored_loads;
  std::map<BusId, BusVoltage> voltages;
  double delta_f = 0.0;  // Hz
  double t_minutes = 0.0;
};

/// Frequency sensitivities of everything connected in a state.
struct FrequencyCoefficients {
  std::map<UnitId, double> k_g;   // MW/Hz
  std::map<LoadId, double> k_lp;  // MW/Hz
  std::map<LoadId, double> k_lq;  // MVar/Hz

  /// Denominator of the steady-state frequency deviation: sum of K_G and K_Lp.
  double total_active() const;
};

FrequencyCoefficients frequency_coefficients(const Grid& grid, const SystemState& state);

struct DpfSolution {
  std::map<BusId, BusVoltage> voltages;
  double delta_f = 0.0;  // Hz
  double p_acc = 0.0;    // MW, scheduled generation minus scheduled load minus losses
  double losses = 0.0;   // MW
  std::map<BusId, std::pair<double, double>> per_bus_mismatch;  // MW, MVar
  std::map<UnitId, Dispatch> unit_output;  // realized P after droop, allocated Q
  bool converged = false;
  int iterations = 0;
};

struct DpfOptions {
  double tolerance = 1e-6;  // per unit mismatch
  int max_iterations = 50;
};

/// Acceleration power: generation minus load minus losses (MW).
constexpr double acceleration_power(double generation_mw, double load_mw, double losses_mw) {
  return generation_mw - load_mw - losses_mw;
}

/// Steady-state frequency deviation for a given acceleration power and total
/// frequency sensitivity (MW/Hz).
constexpr double frequency_deviation(double p_acc_mw, double total_k_mw_per_hz) {
  return p_acc_mw / total_k_mw_per_hz;
}

/// Mismatch equations of the frequency-augmented power flow for one state.
///
/// Unknowns, in order: angles of every energized bus except the reference,
/// magnitudes of buses without an online unit (PQ buses), and the system
/// frequency deviation. Equations: active mismatch at every energized bus,
/// reactive mismatch at every PQ bus. Bus order is ascending id. Buses with an
/// online unit hold their nominal voltage; the lowest-id such bus is the
/// angle reference.
class PowerFlowModel {
 public:
  /// Throws NoFrequencyAnchor, InvalidModel (disconnected island, element on
  /// a dead bus).
  PowerFlowModel(const Grid& grid, const SystemState& state);

  Eigen::Index size() const { return n_unknowns_; }
  Eigen::VectorXd flat_start() const;
  Eigen::VectorXd mismatch(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

  /// Unpacks magnitudes and angles for every energized bus.
  void unpack(const Eigen::VectorXd& x, Eigen::VectorXd& vm, Eigen::VectorXd& va, double& delta_f) const;

  std::span<const BusId> buses() const { return buses_; }
  const Eigen::MatrixXcd& admittance() const { return ybus_; }
  std::size_t reference() const { return ref_; }
  bool is_pv(std::size_t i) const { return pv_[i]; }

  // Per-bus aggregates on the system base.
  const Eigen::VectorXd& p_setpoint() const { return p_gen_; }
  const Eigen::VectorXd& p_load() const { return p_load_; }
  const Eigen::VectorXd& q_load() const { return q_load_; }
  const Eigen::VectorXd& k_gen() const { return k_gen_; }
  const Eigen::VectorXd& k_load_p() const { return k_lp_; }
  const Eigen::VectorXd& k_load_q() const { return k_lq_; }

  /// Calculated network injections P and Q (per unit) at each bus.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> injections(const Eigen::VectorXd& vm,
                                                         const Eigen::VectorXd& va) const;

 private:
  std::vector<BusId> buses_;
  std::vector<bool> pv_;
  std::vector<Eigen::Index> theta_col_, vm_col_;  // -1 when not an unknown
  std::size_t ref_ = 0;
  Eigen::Index n_unknowns_ = 0;
  Eigen::Index df_col_ = 0;
  Eigen::MatrixXcd ybus_;
  Eigen::VectorXd vm_set_;
  Eigen::VectorXd p_gen_, p_load_, q_load_, k_gen_, k_lp_, k_lq_;
  std::vector<Eigen::Index> q_row_;  // reactive equation row per bus, -1 for PV
};

/// Solves the frequency-augmented power flow by Newton iteration from a flat
/// start. Throws NoFrequencyAnchor when no online unit has droop, Diverged
/// when the iteration cap is hit.
DpfSolution solve_dpf(const Grid& grid, const SystemState& state, const DpfOptions& options = {});

enum class Constraint { Frequency, Voltage, ActivePowerLimit, ReactivePowerLimit, Convergence };

std::string_view to_string(Constraint c);

struct Rejection {
  Constraint constraint;
  std::string detail;
};

struct StepCheck {
  std::optional<Rejection> rejection;
  bool accepted() const { return !rejection.has_value(); }
};

struct StepLimits {
  double max_abs_delta_f_hz = 1.0;
  double max_abs_voltage_deviation = 0.05;  // per unit from nominal
};

/// Screens a converged solution against the frequency, voltage and unit P/Q
/// limits. Reports the first violation in that order.
StepCheck check_step(const Grid& grid, const SystemState& state_after, const DpfSolution& solution,
                     const StepLimits& limits = {});

inline constexpr double kDefaultFluctuation = 0.10;

/// Adverse extreme of a load that may fluctuate by `fraction` around its
/// nominal demand. Throws std::invalid_argument if fraction is outside [0, 1].
Demand worst_case_fluctuation(double load_p, double load_q, double fraction = kDefaultFluctuation);

}  // namespace gridrestore

#endif  // GRIDRESTORE_DPF_HPP

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "bnoma/units.hpp"

namespace bnoma {

// Thrown by NetworkConfig::validate(); carries the offending field name so
// the CLI can report it and exit with the validation code.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// Full scenario description. Power levels are stored in dBm (the unit the
// scenario tables use); helpers below convert to watts for the math.
struct NetworkConfig {
  double p_max = 45.0;                 // BS power budget [dBm]
  std::optional<double> q_max = {};    // per-RSU budget [dBm]; default: half of p_max
  double sigma_eps = 1e-3;             // CSI error standard deviation
  double c_min = 0.5;                  // minimum spectral efficiency [bps/Hz]
  double pathloss_exp = 4.0;           // zeta
  double noise_density_dbm = -170.0;   // [dBm/Hz]
  double bandwidth_hz = 1e6;
  double circuit_power_dbm = 5.0;
  double bs_radius_m = 50.0;
  double rsu_radius_m = 20.0;
  double ref_distance_m = 10.0;        // pathloss reference distance d0
  int n_realizations = 1000;
  std::uint64_t seed = 1;
  double step_size_initial = 0.1;      // delta_0
  int max_iterations = 10000;
  double convergence_tol = 1e-5;

  double p_max_w() const { return dbm_to_watt(p_max); }
  double q_max_w() const {
    return q_max ? dbm_to_watt(*q_max) : 0.5 * dbm_to_watt(p_max);
  }
  double q_max_dbm_resolved() const { return watt_to_dbm(q_max_w()); }
  double circuit_power_w() const { return dbm_to_watt(circuit_power_dbm); }
  double noise_w() const { return dbm_to_watt(noise_density_dbm) * bandwidth_hz; }
  // SINR threshold 2^Cmin - 1 shared by every rate constraint
  double gamma_threshold() const { return std::exp2(c_min) - 1.0; }

  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(p_max)) throw ConfigError("p_max", "must be finite");
    if (q_max && !finite(*q_max)) throw ConfigError("q_max", "must be finite");
    if (!finite(sigma_eps) || sigma_eps < 0.0)
      throw ConfigError("sigma_eps", "must be >= 0");
    if (!finite(c_min) || c_min <= 0.0) throw ConfigError("c_min", "must be > 0");
    if (!finite(pathloss_exp) || pathloss_exp <= 0.0)
      throw ConfigError("pathloss_exp", "must be > 0");
    if (!finite(noise_density_dbm))
      throw ConfigError("noise_density_dbm", "must be finite");
    if (!finite(bandwidth_hz) || bandwidth_hz <= 0.0)
      throw ConfigError("bandwidth_hz", "must be > 0");
    if (!finite(circuit_power_dbm))
      throw ConfigError("circuit_power_dbm", "must be finite");
    if (!finite(bs_radius_m) || bs_radius_m <= 0.0)
      throw ConfigError("bs_radius_m", "must be > 0");
    if (!finite(rsu_radius_m) || rsu_radius_m <= 0.0)
      throw ConfigError("rsu_radius_m", "must be > 0");
    if (!finite(ref_distance_m) || ref_distance_m <= 0.0)
      throw ConfigError("ref_distance_m", "must be > 0");
    if (n_realizations <= 0) throw ConfigError("n_realizations", "must be > 0");
    if (!finite(step_size_initial) || step_size_initial <= 0.0)
      throw ConfigError("step_size_initial", "must be > 0");
    if (max_iterations <= 0) throw ConfigError("max_iterations", "must be > 0");
    if (!finite(convergence_tol) || convergence_tol <= 0.0)
      throw ConfigError("convergence_tol", "must be > 0");
  }
};

enum class StepDecay { inv_sqrt, constant };

// Knobs of the iterative sub-gradient stages.
struct SolverSettings {
  double step_initial = 0.1;
  StepDecay decay = StepDecay::inv_sqrt;
  int max_iterations = 10000;
  double convergence_tol = 1e-5;
  int infeasibility_window = 500;  // persistent-violation window
  int stall_window = 200;          // no-progress exit once a feasible point is known

  static SolverSettings from_config(const NetworkConfig& cfg) {
    SolverSettings s;
    s.step_initial = cfg.step_size_initial;
    s.max_iterations = cfg.max_iterations;
    s.convergence_tol = cfg.convergence_tol;
    return s;
  }

  // delta(t) for iteration t >= 1
  double step(int t) const {
    switch (decay) {
      case StepDecay::constant:
        return step_initial;
      case StepDecay::inv_sqrt:
      default:
        return step_initial / std::sqrt(static_cast<double>(t));
    }
  }
};

}  // namespace bnoma

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bnoma/channel.hpp"
#include "bnoma/rng.hpp"
#include "bnoma/solver.hpp"

namespace bnoma {

inline const char* mode_name(Mode m) {
  return m == Mode::ambc ? "ambc" : "pure_noma";
}

inline Mode mode_from_name(const std::string& s) {
  if (s == "ambc") return Mode::ambc;
  if (s == "pure_noma") return Mode::pure_noma;
  throw std::invalid_argument("unknown mode: " + s);
}

struct RunMetrics {
  bool feasible = false;
  double ee_mbpj = 0.0;
  double icsi_w = 0.0;
  double sum_rate = 0.0;
  double total_power_w = 0.0;
  int iterations = 0;
};

// One Monte Carlo draw: generate a channel, run the two-stage solve, report
// the metrics. The channel depends only on (config, seed); the mode selects
// the solver variant, so both modes see identical channels for a seed.
inline std::pair<SolveOutcome, RunMetrics> run_realization(const NetworkConfig& cfg,
                                                           std::uint64_t seed,
                                                           Mode mode) {
  Rng rng(seed);
  const ChannelRealization ch = generate_realization(cfg, rng);
  const SolverSettings settings = SolverSettings::from_config(cfg);
  SolveOutcome out = solve_algorithm1(ch, cfg, settings, mode);

  RunMetrics metrics;
  metrics.iterations = out.iterations_used;
  metrics.feasible = out.status == SolveStatus::converged;
  if (metrics.feasible) {
    const RateReport report = end_to_end_rates(ch, out.solution);
    metrics.sum_rate = report.sum_rate;
    metrics.total_power_w = total_power(out.solution);
    metrics.ee_mbpj = energy_efficiency(report, out.solution, cfg);
    metrics.icsi_w = icsi_interference(ch, out.solution);
  }
  return {std::move(out), metrics};
}

enum class SweepParam { sigma_eps, p_max, rsu_radius, circuit_power };

inline const char* sweep_param_name(SweepParam p) {
  switch (p) {
    case SweepParam::sigma_eps: return "sigma_eps";
    case SweepParam::p_max: return "p_max";
    case SweepParam::rsu_radius: return "rsu_radius";
    case SweepParam::circuit_power: return "circuit_power";
  }
  return "?";
}

inline SweepParam sweep_param_from_name(const std::string& s) {
  if (s == "sigma_eps") return SweepParam::sigma_eps;
  if (s == "p_max") return SweepParam::p_max;
  if (s == "rsu_radius") return SweepParam::rsu_radius;
  if (s == "circuit_power") return SweepParam::circuit_power;
  throw std::invalid_argument("unknown sweep parameter: " + s);
}

inline NetworkConfig apply_sweep_param(NetworkConfig cfg, SweepParam p, double v) {
  switch (p) {
    case SweepParam::sigma_eps: cfg.sigma_eps = v; break;
    case SweepParam::p_max: cfg.p_max = v; break;   // q_max tracks p_max unless set
    case SweepParam::rsu_radius: cfg.rsu_radius_m = v; break;
    case SweepParam::circuit_power: cfg.circuit_power_dbm = v; break;
  }
  return cfg;
}

struct SweepPlan {
  SweepParam param = SweepParam::sigma_eps;
  std::vector<double> values;
  NetworkConfig base;
  int realizations = 1000;
  bool run_ambc = true;
  bool run_pure_noma = true;

  void validate() const {
    base.validate();
    if (values.empty()) throw ConfigError("values", "sweep needs at least one value");
    bool asc = true, desc = true;
    for (std::size_t k = 1; k < values.size(); ++k) {
      asc = asc && values[k] > values[k - 1];
      desc = desc && values[k] < values[k - 1];
    }
    if (values.size() > 1 && !asc && !desc)
      throw ConfigError("values", "sweep values must be strictly ordered");
    if (realizations < 1) throw ConfigError("realizations", "must be >= 1");
    if (!run_ambc && !run_pure_noma)
      throw ConfigError("modes", "at least one mode required");
    for (double v : values) {
      apply_sweep_param(base, param, v).validate();
    }
  }

  std::vector<Mode> modes() const {
    std::vector<Mode> m;
    if (run_ambc) m.push_back(Mode::ambc);
    if (run_pure_noma) m.push_back(Mode::pure_noma);
    return m;
  }
};

struct SweepPointStats {
  double value = 0.0;
  Mode mode = Mode::ambc;
  int n = 0;
  int n_feasible = 0;
  double mean_ee = 0.0;
  double stderr_ee = 0.0;
  double mean_icsi_w = 0.0;
  double feasibility_rate = 0.0;
  double mean_iterations = 0.0;
};

struct SweepResult {
  SweepPlan plan;
  // point stats ordered value-major, ambc before pure_noma
  std::vector<SweepPointStats> points;
  // per-run energy efficiencies aligned with points; NaN marks infeasible runs
  std::vector<std::vector<double>> ee_runs;

  const SweepPointStats* find(double value, Mode mode) const {
    for (const auto& p : points) {
      if (p.value == value && p.mode == mode) return &p;
    }
    return nullptr;
  }
};

namespace detail {

template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::max(1, std::min({threads, n, 64}));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([=] {
      for (int i = w; i < n; i += threads) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

inline int default_thread_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs the full sweep. Channel seeds mix only (master seed, realization
// index); neither the sweep value nor the mode enters the seed, so every
// point and both modes face common random channels and paired or
// across-point comparisons cancel the sampling noise.
inline SweepResult run_sweep(const SweepPlan& plan,
                             int threads = default_thread_count()) {
  plan.validate();
  SweepResult result;
  result.plan = plan;

  const std::vector<Mode> modes = plan.modes();
  for (double value : plan.values) {
    const NetworkConfig cfg = apply_sweep_param(plan.base, plan.param, value);
    for (Mode mode : modes) {
      std::vector<RunMetrics> metrics(plan.realizations);
      detail::parallel_for(plan.realizations, threads, [&](int r) {
        const std::uint64_t seed = mix_seed(plan.base.seed, static_cast<std::uint64_t>(r));
        metrics[r] = run_realization(cfg, seed, mode).second;
      });

      SweepPointStats st;
      st.value = value;
      st.mode = mode;
      st.n = plan.realizations;
      std::vector<double> ee(plan.realizations,
                             std::numeric_limits<double>::quiet_NaN());
      double sum_ee = 0.0, sum_icsi = 0.0, sum_iter = 0.0;
      for (int r = 0; r < plan.realizations; ++r) {
        sum_iter += metrics[r].iterations;
        if (!metrics[r].feasible) continue;
        ++st.n_feasible;
        ee[r] = metrics[r].ee_mbpj;
        sum_ee += metrics[r].ee_mbpj;
        sum_icsi += metrics[r].icsi_w;
      }
      st.feasibility_rate = static_cast<double>(st.n_feasible) / st.n;
      st.mean_iterations = sum_iter / st.n;
      if (st.n_feasible > 0) {
        st.mean_ee = sum_ee / st.n_feasible;
        st.mean_icsi_w = sum_icsi / st.n_feasible;
      }
      if (st.n_feasible > 1) {
        double ss = 0.0;
        for (int r = 0; r < plan.realizations; ++r) {
          if (std::isnan(ee[r])) continue;
          const double d = ee[r] - st.mean_ee;
          ss += d * d;
        }
        st.stderr_ee = std::sqrt(ss / (st.n_feasible - 1)) /
                       std::sqrt(static_cast<double>(st.n_feasible));
      }
      result.points.push_back(st);
      result.ee_runs.push_back(std::move(ee));
    }
  }
  return result;
}

// Paired per-value comparison of the two modes.
struct ModeComparisonPoint {
  double value = 0.0;
  int n_pairs = 0;          // realizations feasible in both modes
  double diff_mean = 0.0;   // mean of (EE_ambc - EE_pure_noma) over pairs
  double diff_stderr = 0.0;
  bool dominance_ok = true;  // diff_mean >= -diff_stderr
};

struct ModeComparison {
  std::vector<ModeComparisonPoint> points;
  bool all_dominant() const {
    for (const auto& p : points)
      if (!p.dominance_ok) return false;
    return true;
  }
};

inline ModeComparison compare_modes(const SweepResult& result) {
  if (!result.plan.run_ambc || !result.plan.run_pure_noma)
    throw std::invalid_argument("compare_modes: both mode columns required");
  ModeComparison cmp;
  for (std::size_t v = 0; v < result.plan.values.size(); ++v) {
    const auto& ee_a = result.ee_runs[2 * v];
    const auto& ee_n = result.ee_runs[2 * v + 1];
    ModeComparisonPoint p;
    p.value = result.plan.values[v];
    double sum = 0.0;
    std::vector<double> diffs;
    diffs.reserve(ee_a.size());
    for (std::size_t r = 0; r < ee_a.size(); ++r) {
      if (std::isnan(ee_a[r]) || std::isnan(ee_n[r])) continue;
      diffs.push_back(ee_a[r] - ee_n[r]);
      sum += diffs.back();
    }
    p.n_pairs = static_cast<int>(diffs.size());
    if (p.n_pairs > 0) p.diff_mean = sum / p.n_pairs;
    if (p.n_pairs > 1) {
      double ss = 0.0;
      for (double d : diffs) ss += (d - p.diff_mean) * (d - p.diff_mean);
      p.diff_stderr = std::sqrt(ss / (p.n_pairs - 1)) /
                      std::sqrt(static_cast<double>(p.n_pairs));
    }
    p.dominance_ok = p.diff_mean >= -p.diff_stderr;
    cmp.points.push_back(p);
  }
  return cmp;
}

}  // namespace bnoma

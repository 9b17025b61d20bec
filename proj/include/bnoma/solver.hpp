#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "bnoma/feasibility.hpp"
#include "bnoma/lagrangian.hpp"
#include "bnoma/rate_model.hpp"

namespace bnoma {

enum class SolveStatus { converged, max_iterations, infeasible };

enum class Mode { ambc, pure_noma };

struct SolveOutcome {
  PowerSolution solution{};
  bool converged = false;
  int iterations_used = 0;
  ConstraintSlacks slacks{};
  SolveStatus status = SolveStatus::infeasible;
};

// Per-equation step factors. The plain updates use unit factors; the solve
// drivers precondition each equation by its natural scale so one delta(t)
// schedule serves primal and dual variables whose magnitudes differ by many
// orders. This leaves the update equations themselves untouched.
struct StepScalesP1 {
  double alpha = 1.0;
  double psi1 = 1.0;
  double psi2 = 1.0;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
};

struct StepScalesP2m {
  double beta = 1.0;
  double xi = 1.0;
  double eta1 = 1.0;
  double eta2 = 1.0;
  double mu = 1.0;
  double zeta_mul = 1.0;
  double upsilon = 1.0;
};

struct P1State {
  std::array<double, 2> alpha{0.5, 0.5};
};

// One primal descent / dual ascent pass for P1: projected primal step along
// the analytic gradient, proportional rescale of the coefficient sum, then
// multiplier ascent along the constraint slacks.
inline void step_p1(P1State& state, DualStateP1& duals, const ChannelRealization& ch,
                    const NetworkConfig& cfg, const SolverSettings& settings,
                    const StepScalesP1& scales = {}) {
  const int t = ++duals.iteration;
  const double delta = settings.step(t);

  const std::array<double, 2> g = grad_p1(state.alpha, duals, ch, cfg);
  for (int i = 0; i < 2; ++i) {
    state.alpha[i] = std::max(state.alpha[i] - delta * scales.alpha * g[i], 0.0);
  }
  const double sum = state.alpha[0] + state.alpha[1];
  if (sum > 1.0) {
    state.alpha[0] /= sum;
    state.alpha[1] /= sum;
  }

  const P1Slacks s = p1_slacks(state.alpha, ch, cfg);
  duals.psi1 = std::max(duals.psi1 - delta * scales.psi1 * s.rate1, 0.0);
  duals.psi2 = std::max(duals.psi2 - delta * scales.psi2 * s.rate2, 0.0);
  duals.lambda1 = std::max(duals.lambda1 - delta * scales.lambda1 * s.budget, 0.0);
  duals.lambda2 = std::max(duals.lambda2 - delta * scales.lambda2 * s.coeff, 0.0);
}

namespace detail {

inline StepScalesP1 p1_scales(const ChannelRealization& ch, const NetworkConfig& cfg) {
  const double p = cfg.p_max_w();
  const double g1p = ch.g_bs_rsu[0] * p;
  const double g2p = ch.g_bs_rsu[1] * p;
  StepScalesP1 s;
  s.alpha = 1.0 / p;
  s.psi1 = p / (g1p * g1p);
  s.psi2 = p / (g2p * g2p);
  s.lambda1 = 1.0 / p;
  s.lambda2 = p;
  return s;
}

// Minimum-power boundary point of P1: both rate constraints tight. The
// per-coordinate tightening maps are standard interference functions, so
// from zero the iterates climb monotonically to the unique minimal fixed
// point; a feasible P1 point exists iff that point stays inside the
// coefficient simplex.
struct P1FixedPoint {
  bool ok = false;
  std::array<double, 2> alpha{};
};

inline P1FixedPoint p1_fixed_point(const ChannelRealization& ch,
                                   const NetworkConfig& cfg) {
  const double gth = cfg.gamma_threshold();
  const double eps2 = ch.sigma_eps_sq;
  const double g1 = ch.g_bs_rsu[0];
  const double g2 = ch.g_bs_rsu[1];
  const double d1 = g1 - gth * eps2;
  const double d2 = g2 - gth * eps2;
  if (!(d1 > 0.0) || !(d2 > 0.0)) return {};
  const double n_over_p = ch.noise_w / cfg.p_max_w();

  P1FixedPoint fp;
  std::array<double, 2>& a = fp.alpha;
  for (int it = 0; it < 500; ++it) {
    const double prev0 = a[0];
    const double prev1 = a[1];
    a[0] = gth * (eps2 * a[1] + n_over_p) / d1;
    a[1] = gth * ((g2 + eps2) * a[0] + n_over_p) / d2;
    if (a[0] + a[1] > 1.0) return {};  // minimal point leaves the simplex
    if (std::abs(a[0] - prev0) <= 1e-15 * a[0] &&
        std::abs(a[1] - prev1) <= 1e-15 * a[1])
      break;
  }
  fp.ok = true;
  return fp;
}

inline double p1_rate_violation(const std::array<double, 2>& alpha,
                                const ChannelRealization& ch,
                                const NetworkConfig& cfg) {
  PowerSolution sol;
  sol.p_bs_w = cfg.p_max_w();
  sol.alpha = alpha;
  const auto [gamma1, gamma2] = sinr_first_hop(ch, sol);
  return std::max({0.0, cfg.c_min - std::log2(1.0 + gamma1),
                   cfg.c_min - std::log2(1.0 + gamma2)});
}

}  // namespace detail

// Stage 1: iterate the projected sub-gradient updates from
// alpha = (0.5, 0.5); the boundary fixed point then finishes the solution
// and settles feasibility.
inline SolveOutcome solve_p1(const ChannelRealization& ch, const NetworkConfig& cfg,
                             const SolverSettings& settings) {
  const StepScalesP1 scales = detail::p1_scales(ch, cfg);
  P1State state;
  DualStateP1 duals;

  double best_power = std::numeric_limits<double>::infinity();
  bool have_best = false;
  int no_progress = 0;
  int violation_run = 0;
  int iterations = settings.max_iterations;

  for (int t = 1; t <= settings.max_iterations; ++t) {
    const std::array<double, 2> prev = state.alpha;
    step_p1(state, duals, ch, cfg, settings, scales);

    const P1Slacks s = p1_slacks(state.alpha, ch, cfg);
    bool improved = false;
    if (s.rate1 >= 0.0 && s.rate2 >= 0.0 && s.budget >= 0.0 && s.coeff >= 0.0) {
      const double power = cfg.p_max_w() * (state.alpha[0] + state.alpha[1]);
      if (power < best_power) {
        best_power = power;
        have_best = true;
        improved = true;
      }
    }

    const double step_change =
        std::max(std::abs(state.alpha[0] - prev[0]), std::abs(state.alpha[1] - prev[1]));
    const double violation = detail::p1_rate_violation(state.alpha, ch, cfg);

    // converged, stalled with a certified point, or persistently violated
    // while saturated at the coefficient bound
    if (step_change < settings.convergence_tol && violation < settings.convergence_tol) {
      iterations = t;
      break;
    }
    no_progress = (!improved && step_change < 10.0 * settings.convergence_tol)
                      ? no_progress + 1
                      : 0;
    if (have_best && no_progress >= settings.stall_window) {
      iterations = t;
      break;
    }
    const bool saturated = state.alpha[0] + state.alpha[1] >= 1.0 - 1e-9;
    violation_run =
        (!have_best && violation > settings.convergence_tol && saturated)
            ? violation_run + 1
            : 0;
    if (violation_run >= settings.infeasibility_window) {
      iterations = t;
      break;
    }
  }

  // The tightening fixed point arbitrates the final status: it either
  // produces the minimal feasible point or certifies that none exists.
  SolveOutcome out;
  out.iterations_used = iterations;
  out.solution.p_bs_w = cfg.p_max_w();
  const detail::P1FixedPoint fp = detail::p1_fixed_point(ch, cfg);
  if (fp.ok) {
    out.solution.alpha = fp.alpha;
    out.status = SolveStatus::converged;
    out.converged = true;
  } else {
    out.solution.alpha = state.alpha;
    out.status = SolveStatus::infeasible;
    out.converged = false;
  }
  out.slacks = feasibility_check(out.solution, ch, cfg);
  out.slacks.stage2_valid = false;
  return out;
}

// ----- stage 2 -------------------------------------------------------------

struct P2StateM {
  double b1 = 0.5;
  double b2 = 0.5;
  double x = 0.5;
};

struct P2State {
  std::array<P2StateM, 2> rsu{};
  std::array<double, 2> q{};         // nominal RSU powers
  std::array<double, 2> radiated{};  // powers feeding the cross interference
  std::array<double, 2> pi{};        // frozen NOMA interference terms
};

inline P2State init_p2_state(const ChannelRealization& ch, const NetworkConfig& cfg,
                             const std::array<double, 2>& q_rsu_w, Mode mode) {
  P2State st;
  st.q = q_rsu_w;
  for (int m = 0; m < 2; ++m) {
    st.rsu[m] = P2StateM{};
    if (mode == Mode::pure_noma) st.rsu[m].x = 0.0;
    // initial interference bootstrap: radiated power Qmax/2 per RSU
    st.radiated[m] = 0.5 * cfg.q_max_w();
  }
  for (int m = 0; m < 2; ++m) {
    const double u2 =
        ch.g_rsu_veh[m][1] + st.rsu[m].x * ch.g_tag_veh[m][1] * ch.g_rsu_tag[m];
    st.pi[m] = st.q[m] * st.rsu[m].b1 * u2;
  }
  return st;
}

// One outer pass of the stage-2 updates: per RSU, a projected primal step
// and multiplier ascent against the currently frozen interference, then the
// radiated power and NOMA interference are re-derived.
inline void step_p2(P2State& state, DualStateP2& duals, const ChannelRealization& ch,
                    const NetworkConfig& cfg, const SolverSettings& settings,
                    Mode mode, const std::array<StepScalesP2m, 2>& scales = {}) {
  const int t = ++duals.iteration;
  const double delta = settings.step(t);

  for (int m = 0; m < 2; ++m) {
    P2StateM& v = state.rsu[m];
    DualStateP2m& d = duals.rsu[m];
    const StepScalesP2m& sc = scales[m];
    const P2Frozen frozen{state.q[m], ch.g_cross[m][0] * state.radiated[1 - m],
                          ch.g_cross[m][1] * state.radiated[1 - m], state.pi[m]};

    const std::array<double, 3> g =
        grad_p2(v.b1, v.b2, v.x, d, m, frozen, ch, cfg);
    v.b1 = std::max(v.b1 - delta * sc.beta * g[0], 0.0);
    v.b2 = std::max(v.b2 - delta * sc.beta * g[1], 0.0);
    const double sum = v.b1 + v.b2;
    if (sum > 1.0) {
      v.b1 /= sum;
      v.b2 /= sum;
    }
    if (mode == Mode::ambc) {
      v.x = std::clamp(v.x - delta * sc.xi * g[2], 0.0, 1.0);
    } else {
      v.x = 0.0;
    }

    const P2Slacks s = p2_slacks(v.b1, v.b2, v.x, m, frozen, ch, cfg);
    d.eta1 = std::max(d.eta1 - delta * sc.eta1 * s.rate1, 0.0);
    d.eta2 = std::max(d.eta2 - delta * sc.eta2 * s.rate2, 0.0);
    d.mu = std::max(d.mu - delta * sc.mu * s.budget, 0.0);
    d.zeta_mul = std::max(d.zeta_mul - delta * sc.zeta_mul * s.coeff, 0.0);
    d.upsilon = std::max(d.upsilon - delta * sc.upsilon * s.xi_bound, 0.0);

    state.radiated[m] = state.q[m] * (v.b1 + v.b2);
    const double u2 = ch.g_rsu_veh[m][1] + v.x * ch.g_tag_veh[m][1] * ch.g_rsu_tag[m];
    state.pi[m] = state.q[m] * v.b1 * u2;
  }
}

namespace detail {

inline std::array<StepScalesP2m, 2> p2_scales(const ChannelRealization& ch,
                                              const NetworkConfig& cfg,
                                              const std::array<double, 2>& q) {
  std::array<StepScalesP2m, 2> out{};
  const double qmax = cfg.q_max_w();
  for (int m = 0; m < 2; ++m) {
    const double g1q = ch.g_rsu_veh[m][0] * q[m];
    const double g2q = ch.g_rsu_veh[m][1] * q[m];
    out[m].beta = 1.0 / q[m];
    out[m].xi = 1.0 / q[m];
    out[m].eta1 = q[m] / (g1q * g1q);
    out[m].eta2 = q[m] / (g2q * g2q);
    out[m].mu = q[m] / (qmax * qmax);
    out[m].zeta_mul = q[m];
    out[m].upsilon = q[m];
  }
  return out;
}

inline PowerSolution p2_to_solution(const P2State& st, const NetworkConfig& cfg) {
  PowerSolution sol;
  sol.p_bs_w = cfg.p_max_w();
  for (int m = 0; m < 2; ++m) {
    sol.beta[m] = {st.rsu[m].b1, st.rsu[m].b2};
    sol.xi[m] = st.rsu[m].x;
    sol.q_rsu_w[m] = st.q[m];
  }
  return sol;
}

// Rate violation of the stage-2 constraints with interference terms derived
// from the candidate itself.
inline double p2_rate_violation(const P2State& st, const ChannelRealization& ch,
                                const NetworkConfig& cfg) {
  const PowerSolution sol = p2_to_solution(st, cfg);
  double v = 0.0;
  for (int m = 0; m < 2; ++m) {
    const auto [g1m, g2m] = sinr_second_hop(ch, sol, m);
    v = std::max({v, cfg.c_min - std::log2(1.0 + g1m),
                  cfg.c_min - std::log2(1.0 + g2m)});
  }
  return v;
}

inline bool p2_feasible(const P2State& st, const ChannelRealization& ch,
                        const NetworkConfig& cfg) {
  const PowerSolution sol = p2_to_solution(st, cfg);
  const ConstraintSlacks s = feasibility_check(sol, ch, cfg);
  for (int m = 0; m < 2; ++m) {
    if (s.rate_veh1[m] < 0.0 || s.rate_veh2[m] < 0.0 || s.rsu_budget_w[m] < 0.0 ||
        s.rsu_coeff[m] < 0.0)
      return false;
  }
  return true;
}

inline double p2_total_power(const P2State& st) {
  return st.q[0] * (st.rsu[0].b1 + st.rsu[0].b2) +
         st.q[1] * (st.rsu[1].b1 + st.rsu[1].b2);
}

// Joint minimum-power boundary point of stage 2 at fixed reflection
// coefficients: per RSU, tighten both vehicle rate constraints to equality
// in radiated-power form and alternate until the interference-coupled
// system settles. The maps are standard interference functions, so from
// zero the iterates increase monotonically to the unique minimal fixed
// point (or overrun a cap, which certifies infeasibility at these xi).
struct P2FixedPoint {
  bool ok = false;
  std::array<std::array<double, 2>, 2> y{};  // y[m][i] = Q_m * beta_{i,m}
  double total = std::numeric_limits<double>::infinity();
};

inline P2FixedPoint p2_fixed_point(const ChannelRealization& ch,
                                   const NetworkConfig& cfg,
                                   const std::array<double, 2>& q,
                                   const std::array<double, 2>& xi) {
  const double gth = cfg.gamma_threshold();
  const double eps2 = ch.sigma_eps_sq;
  const double n = ch.noise_w;
  const double qmax = cfg.q_max_w();

  std::array<double, 2> d1{}, d2{}, u2{};
  for (int m = 0; m < 2; ++m) {
    const double u1m =
        ch.g_rsu_veh[m][0] + xi[m] * ch.g_tag_veh[m][0] * ch.g_rsu_tag[m];
    u2[m] = ch.g_rsu_veh[m][1] + xi[m] * ch.g_tag_veh[m][1] * ch.g_rsu_tag[m];
    d1[m] = u1m - gth * eps2;
    d2[m] = u2[m] - gth * eps2;
    if (!(d1[m] > 0.0) || !(d2[m] > 0.0)) return {};
  }

  P2FixedPoint fp;
  std::array<std::array<double, 2>, 2>& y = fp.y;
  for (int pass = 0; pass < 2000; ++pass) {
    double rel_change = 0.0;
    for (int m = 0; m < 2; ++m) {
      const double other = y[1 - m][0] + y[1 - m][1];
      const double i1 = ch.g_cross[m][0] * other;
      const double i2 = ch.g_cross[m][1] * other;
      const double y1 = gth * (eps2 * (y[m][1] + xi[m]) + i1 + n) / d1[m];
      const double y2 = gth * (y1 * (u2[m] + eps2) + eps2 * xi[m] + i2 + n) / d2[m];
      rel_change = std::max({rel_change, std::abs(y1 - y[m][0]) / y1,
                             std::abs(y2 - y[m][1]) / y2});
      y[m] = {y1, y2};
      const double cap = std::min(q[m], qmax);
      if (y1 + y2 > cap) return {};  // minimal point violates a power cap
    }
    if (rel_change <= 1e-15) break;
  }
  fp.ok = true;
  fp.total = y[0][0] + y[0][1] + y[1][0] + y[1][1];
  return fp;
}

// Refines the sub-gradient output: the reflection coefficient keeps the
// converged value or snaps to its bounds, whichever coupled boundary point
// consumes the least power. Switching the tag off is always admissible, so
// the AmBC solution never exceeds the pure-NOMA one.
inline bool p2_polish(P2State& st, const ChannelRealization& ch,
                      const NetworkConfig& cfg, Mode mode) {
  std::array<std::array<double, 2>, 2> cand{};
  int n0 = 0, n1 = 0;
  auto push = [](std::array<double, 2>& arr, int& n, double v) {
    for (int k = 0; k < n; ++k)
      if (arr[k] == v) return;
    arr[n++] = v;
  };
  if (mode == Mode::ambc) {
    push(cand[0], n0, st.rsu[0].x);
    push(cand[0], n0, 0.0);
    push(cand[0], n0, 1.0);
    push(cand[1], n1, st.rsu[1].x);
    push(cand[1], n1, 0.0);
    push(cand[1], n1, 1.0);
  } else {
    push(cand[0], n0, 0.0);
    push(cand[1], n1, 0.0);
  }

  P2FixedPoint best;
  std::array<double, 2> best_xi{};
  for (int a = 0; a < n0; ++a) {
    for (int b = 0; b < n1; ++b) {
      const std::array<double, 2> xi{cand[0][a], cand[1][b]};
      const P2FixedPoint fp = p2_fixed_point(ch, cfg, st.q, xi);
      if (fp.ok && fp.total < best.total) {
        best = fp;
        best_xi = xi;
      }
    }
  }
  if (!best.ok) return false;
  for (int m = 0; m < 2; ++m) {
    st.rsu[m].x = best_xi[m];
    st.rsu[m].b1 = best.y[m][0] / st.q[m];
    st.rsu[m].b2 = best.y[m][1] / st.q[m];
    st.radiated[m] = best.y[m][0] + best.y[m][1];
    const double u2 =
        ch.g_rsu_veh[m][1] + st.rsu[m].x * ch.g_tag_veh[m][1] * ch.g_rsu_tag[m];
    st.pi[m] = st.q[m] * st.rsu[m].b1 * u2;
  }
  return true;
}

inline SolveOutcome solve_p2_single(const ChannelRealization& ch,
                                    const NetworkConfig& cfg,
                                    const SolverSettings& settings,
                                    const std::array<double, 2>& q_rsu_w, Mode mode) {
  const std::array<StepScalesP2m, 2> scales = p2_scales(ch, cfg, q_rsu_w);
  P2State state = init_p2_state(ch, cfg, q_rsu_w, mode);
  DualStateP2 duals;

  P2State best{};
  double best_power = std::numeric_limits<double>::infinity();
  bool have_best = false;
  int no_progress = 0;
  int violation_run = 0;
  int iterations = settings.max_iterations;

  for (int t = 1; t <= settings.max_iterations; ++t) {
    const P2State prev = state;
    step_p2(state, duals, ch, cfg, settings, mode, scales);

    bool improved = false;
    if (p2_feasible(state, ch, cfg)) {
      const double power = p2_total_power(state);
      if (power < best_power) {
        best_power = power;
        best = state;
        have_best = true;
        improved = true;
      }
    }

    double step_change = 0.0;
    for (int m = 0; m < 2; ++m) {
      step_change = std::max({step_change, std::abs(state.rsu[m].b1 - prev.rsu[m].b1),
                              std::abs(state.rsu[m].b2 - prev.rsu[m].b2),
                              std::abs(state.rsu[m].x - prev.rsu[m].x)});
    }
    const double violation = p2_rate_violation(state, ch, cfg);

    if (step_change < settings.convergence_tol && violation < settings.convergence_tol) {
      iterations = t;
      break;
    }
    no_progress = (!improved && step_change < 10.0 * settings.convergence_tol)
                      ? no_progress + 1
                      : 0;
    if (have_best && no_progress >= settings.stall_window) {
      iterations = t;
      break;
    }
    const bool saturated = state.rsu[0].b1 + state.rsu[0].b2 >= 1.0 - 1e-9 ||
                           state.rsu[1].b1 + state.rsu[1].b2 >= 1.0 - 1e-9;
    violation_run =
        (!have_best && violation > settings.convergence_tol && saturated)
            ? violation_run + 1
            : 0;
    if (violation_run >= settings.infeasibility_window) {
      iterations = t;
      break;
    }
  }

  // The coupled fixed point arbitrates the final status; the reflection
  // candidates come from the iterate the sub-gradient phase settled on.
  SolveOutcome out;
  out.iterations_used = iterations;
  P2State final_state = have_best ? best : state;
  if (p2_polish(final_state, ch, cfg, mode)) {
    out.solution = p2_to_solution(final_state, cfg);
    out.status = SolveStatus::converged;
    out.converged = true;
  } else {
    out.solution = p2_to_solution(state, cfg);
    out.status = SolveStatus::infeasible;
    out.converged = false;
  }
  out.slacks = feasibility_check(out.solution, ch, cfg);
  out.slacks.stage1_valid = false;
  return out;
}

}  // namespace detail

// Stage 2: RSU power allocation and reflection coefficients.
inline SolveOutcome solve_p2(const ChannelRealization& ch, const NetworkConfig& cfg,
                             const SolverSettings& settings,
                             const std::array<double, 2>& q_rsu_w, Mode mode) {
  return detail::solve_p2_single(ch, cfg, settings, q_rsu_w, mode);
}

// Hop-2 nominal power split: proportional to the stage-1 coefficients and
// bounded by the per-RSU budget.
inline std::array<double, 2> assign_q(const std::array<double, 2>& alpha,
                                      const NetworkConfig& cfg) {
  const double qmax = cfg.q_max_w();
  const double sum = alpha[0] + alpha[1];
  if (!(sum > 0.0)) return {0.5 * qmax, 0.5 * qmax};
  return {std::min(qmax, 2.0 * qmax * alpha[0] / sum),
          std::min(qmax, 2.0 * qmax * alpha[1] / sum)};
}

// Full two-stage pipeline.
inline SolveOutcome solve_algorithm1(const ChannelRealization& ch,
                                     const NetworkConfig& cfg,
                                     const SolverSettings& settings, Mode mode) {
  SolveOutcome stage1 = solve_p1(ch, cfg, settings);
  if (stage1.status == SolveStatus::infeasible) return stage1;

  const std::array<double, 2> q = assign_q(stage1.solution.alpha, cfg);
  SolveOutcome stage2 = solve_p2(ch, cfg, settings, q, mode);

  SolveOutcome out;
  out.solution = stage2.solution;
  out.solution.alpha = stage1.solution.alpha;
  out.solution.p_bs_w = stage1.solution.p_bs_w;
  out.iterations_used = stage1.iterations_used + stage2.iterations_used;
  out.status = stage2.status == SolveStatus::infeasible ? SolveStatus::infeasible
               : (stage1.status == SolveStatus::max_iterations ||
                  stage2.status == SolveStatus::max_iterations)
                   ? SolveStatus::max_iterations
                   : SolveStatus::converged;
  out.converged = out.status == SolveStatus::converged;
  out.slacks = feasibility_check(out.solution, ch, cfg);
  return out;
}

}  // namespace bnoma

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "bnoma/rate_model.hpp"

namespace bnoma {

// Signed constraint slacks of a full solution. Rate constraints are reported
// as spectral-efficiency slacks (bps/Hz), power budgets in watts, coefficient
// bounds dimensionless. Feasible means every slack >= 0.
struct ConstraintSlacks {
  // stage 1
  double rate_rsu1 = 0.0;
  double rate_rsu2 = 0.0;
  double bs_budget_w = 0.0;
  double bs_coeff = 0.0;
  // stage 2, per RSU
  std::array<double, 2> rate_veh1{};
  std::array<double, 2> rate_veh2{};
  std::array<double, 2> rsu_budget_w{};
  std::array<double, 2> rsu_coeff{};
  std::array<double, 2> xi_low{};
  std::array<double, 2> xi_high{};
  bool stage1_valid = true;
  bool stage2_valid = true;

  double min_slack() const {
    double lo = std::numeric_limits<double>::infinity();
    if (stage1_valid) {
      lo = std::min({lo, rate_rsu1, rate_rsu2, bs_budget_w, bs_coeff});
    }
    if (stage2_valid) {
      for (int m = 0; m < 2; ++m) {
        lo = std::min({lo, rate_veh1[m], rate_veh2[m], rsu_budget_w[m], rsu_coeff[m],
                       xi_low[m], xi_high[m]});
      }
    }
    return lo;
  }

  bool feasible(double tol) const { return min_slack() >= -tol; }
};

// Evaluates every constraint of the two stagewise problems on a solution.
inline ConstraintSlacks feasibility_check(const PowerSolution& sol,
                                          const ChannelRealization& ch,
                                          const NetworkConfig& cfg,
                                          double /*tol*/ = 0.0) {
  ConstraintSlacks s;
  const auto [gamma1, gamma2] = sinr_first_hop(ch, sol);
  s.rate_rsu1 = std::log2(1.0 + gamma1) - cfg.c_min;
  s.rate_rsu2 = std::log2(1.0 + gamma2) - cfg.c_min;
  s.bs_budget_w = cfg.p_max_w() - sol.p_bs_w * sol.alpha_sum();
  s.bs_coeff = 1.0 - sol.alpha_sum();
  for (int m = 0; m < 2; ++m) {
    const auto [g1m, g2m] = sinr_second_hop(ch, sol, m);
    s.rate_veh1[m] = std::log2(1.0 + g1m) - cfg.c_min;
    s.rate_veh2[m] = std::log2(1.0 + g2m) - cfg.c_min;
    s.rsu_budget_w[m] = cfg.q_max_w() - sol.q_rsu_w[m] * sol.beta_sum(m);
    s.rsu_coeff[m] = 1.0 - sol.beta_sum(m);
    s.xi_low[m] = sol.xi[m];
    s.xi_high[m] = 1.0 - sol.xi[m];
  }
  return s;
}

}  // namespace bnoma

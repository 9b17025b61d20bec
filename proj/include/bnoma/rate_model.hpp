#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "bnoma/channel.hpp"
#include "bnoma/config.hpp"

namespace bnoma {

// Converged primal variables plus the nominal transmit powers they scale.
struct PowerSolution {
  std::array<double, 2> alpha{0.0, 0.0};              // BS coefficients
  std::array<std::array<double, 2>, 2> beta{};        // [rsu][vehicle]
  std::array<double, 2> xi{0.0, 0.0};                 // reflection coefficients
  double p_bs_w = 0.0;                                // P
  std::array<double, 2> q_rsu_w{0.0, 0.0};            // Q_m

  double alpha_sum() const { return alpha[0] + alpha[1]; }
  double beta_sum(int m) const { return beta[m][0] + beta[m][1]; }
  // power actually radiated by RSU m; feeds the inter-RSU interference
  double radiated_rsu_w(int m) const { return q_rsu_w[m] * beta_sum(m); }
};

// First-hop SINRs at the RSUs (stronger RSU decodes after SIC, weaker one
// treats the companion signal as noise).
inline std::pair<double, double> sinr_first_hop(const ChannelRealization& ch,
                                                const PowerSolution& sol) {
  const double p = sol.p_bs_w;
  const double icsi = p * ch.sigma_eps_sq * sol.alpha_sum();
  const double g1 = ch.g_bs_rsu[0];
  const double g2 = ch.g_bs_rsu[1];
  const double gamma1 = g1 * p * sol.alpha[0] / (icsi + ch.noise_w);
  const double gamma2 =
      g2 * p * sol.alpha[1] / (g2 * p * sol.alpha[0] + icsi + ch.noise_w);
  return {gamma1, gamma2};
}

// Useful-channel factor of vehicle (i,m): direct gain plus the reflected
// product channel scaled by the reflection coefficient.
inline double effective_gain(const ChannelRealization& ch, const PowerSolution& sol,
                             int m, int i) {
  return ch.g_rsu_veh[m][i] + sol.xi[m] * ch.g_tag_veh[m][i] * ch.g_rsu_tag[m];
}

// NOMA interference seen by the weak vehicle of RSU m.
inline double noma_interference_w(const ChannelRealization& ch,
                                  const PowerSolution& sol, int m) {
  return sol.q_rsu_w[m] * sol.beta[m][0] * effective_gain(ch, sol, m, 1);
}

// Inter-RSU interference at vehicle (i,m), driven by the other RSU's
// radiated power.
inline double cross_interference_w(const ChannelRealization& ch,
                                   const PowerSolution& sol, int m, int i) {
  return ch.g_cross[m][i] * sol.radiated_rsu_w(1 - m);
}

// imperfect-CSI term of RSU m's second hop denominator
inline double icsi_second_hop_w(const ChannelRealization& ch,
                                const PowerSolution& sol, int m) {
  return ch.sigma_eps_sq * (sol.q_rsu_w[m] * sol.beta_sum(m) + sol.xi[m]);
}

// Second-hop SINRs at the two vehicles of RSU m.
inline std::pair<double, double> sinr_second_hop(const ChannelRealization& ch,
                                                 const PowerSolution& sol, int m) {
  const double q = sol.q_rsu_w[m];
  const double icsi = icsi_second_hop_w(ch, sol, m);
  const double gamma1 =
      q * sol.beta[m][0] * effective_gain(ch, sol, m, 0) /
      (icsi + cross_interference_w(ch, sol, m, 0) + ch.noise_w);
  const double gamma2 =
      q * sol.beta[m][1] * effective_gain(ch, sol, m, 1) /
      (noma_interference_w(ch, sol, m) + icsi +
       cross_interference_w(ch, sol, m, 1) + ch.noise_w);
  return {gamma1, gamma2};
}

// Per-Hz rate of one slot: slot * log2(1 + sinr).
inline double rate(double sinr, double slot) {
  return slot * std::log2(1.0 + sinr);
}

// All per-link and end-to-end rates of one solution, in bps/Hz.
struct RateReport {
  double c1 = 0.0;  // first-hop rate of RSU 1
  double c2 = 0.0;
  std::array<std::array<double, 2>, 2> c_veh{};  // second-hop rates
  std::array<std::array<double, 2>, 2> e2e{};    // decode-and-forward rates
  double sum_rate = 0.0;
  double t1 = 0.5;
  double t2 = 0.5;
};

inline RateReport end_to_end_rates(const ChannelRealization& ch,
                                   const PowerSolution& sol) {
  RateReport r;
  const auto [gamma1, gamma2] = sinr_first_hop(ch, sol);
  r.c1 = rate(gamma1, r.t1);
  r.c2 = rate(gamma2, r.t1);
  const std::array<double, 2> hop1{r.c1, r.c2};
  for (int m = 0; m < 2; ++m) {
    const auto [g1m, g2m] = sinr_second_hop(ch, sol, m);
    r.c_veh[m][0] = rate(g1m, r.t2);
    r.c_veh[m][1] = rate(g2m, r.t2);
    for (int i = 0; i < 2; ++i) {
      r.e2e[m][i] = 0.5 * std::min(hop1[m], r.c_veh[m][i]);
      r.sum_rate += r.e2e[m][i];
    }
  }
  return r;
}

// Total transmit power P(a1+a2) + sum_m Q_m(b1m+b2m).
inline double total_power(const PowerSolution& sol) {
  double total = sol.p_bs_w * sol.alpha_sum();
  for (int m = 0; m < 2; ++m) total += sol.q_rsu_w[m] * sol.beta_sum(m);
  return total;
}

// Network energy efficiency in Mb/J: delivered rate over consumed power
// including the circuit power.
inline double energy_efficiency(const RateReport& report, const PowerSolution& sol,
                                const NetworkConfig& cfg) {
  const double consumption_w = total_power(sol) + cfg.circuit_power_w();
  if (!(consumption_w > 0.0))
    throw std::domain_error("energy_efficiency: zero total consumption");
  return report.sum_rate * cfg.bandwidth_hz / consumption_w / 1e6;
}

// Aggregate interference injected by channel-estimation error, both hops.
inline double icsi_interference(const ChannelRealization& ch,
                                const PowerSolution& sol) {
  double total = sol.p_bs_w * ch.sigma_eps_sq * sol.alpha_sum();
  for (int m = 0; m < 2; ++m) total += icsi_second_hop_w(ch, sol, m);
  return total;
}

}  // namespace bnoma

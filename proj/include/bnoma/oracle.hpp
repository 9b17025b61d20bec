#pragma once

#include <array>
#include <cmath>
#include <limits>

#include "bnoma/channel.hpp"
#include "bnoma/config.hpp"
#include "bnoma/feasibility.hpp"

namespace bnoma {

// Exhaustive-search resolution; every coefficient axis is covered on
// {0, res, 2*res, ..., 1}.
struct GridSpec {
  double resolution = 1e-3;
};

struct GridResultP1 {
  bool feasible = false;
  std::array<double, 2> alpha{};
  double power_w = std::numeric_limits<double>::infinity();
};

// Brute-force minimizer of P(a1+a2) over the P1 constraint set. Cells are
// visited in lexicographic (a1, a2) order and only strict improvements are
// kept, so ties resolve to the smallest a1, then smallest a2.
inline GridResultP1 grid_search_p1(const ChannelRealization& ch,
                                   const NetworkConfig& cfg, const GridSpec& spec) {
  const double p = cfg.p_max_w();
  const double gth = cfg.gamma_threshold();
  const double eps_p = p * ch.sigma_eps_sq;
  const double n = ch.noise_w;
  const double g1p = ch.g_bs_rsu[0] * p;
  const double g2p = ch.g_bs_rsu[1] * p;
  const int steps = static_cast<int>(std::round(1.0 / spec.resolution));

  GridResultP1 best;
  for (int i = 0; i <= steps; ++i) {
    const double a1 = i * spec.resolution;
    for (int j = 0; j <= steps; ++j) {
      const double a2 = j * spec.resolution;
      const double sum = a1 + a2;
      if (sum > 1.0) break;  // coefficient sum (and the budget, P = Pmax)
      const double icsi = eps_p * sum;
      if (g1p * a1 < gth * (icsi + n)) continue;                  // rate floor of the strong RSU
      if (g2p * a2 < gth * (g2p * a1 + icsi + n)) continue;       // rate floor of the weak RSU
      if (p * sum > cfg.p_max_w()) continue;                      // BS budget
      const double power = p * sum;
      if (power < best.power_w) {
        best.feasible = true;
        best.alpha = {a1, a2};
        best.power_w = power;
      }
    }
  }
  return best;
}

struct GridResultP2m {
  bool feasible = false;
  double b1 = 0.0;
  double b2 = 0.0;
  double xi = 0.0;
  double power_w = std::numeric_limits<double>::infinity();
};

// Per-RSU brute force over (b1, b2, xi) at frozen cross interference,
// minimizing Q(b1+b2). Lexicographic tie-break over (b1, b2, xi).
inline std::array<GridResultP2m, 2> grid_search_p2(
    const ChannelRealization& ch, const NetworkConfig& cfg, const GridSpec& spec,
    const std::array<double, 2>& q_rsu_w,
    const std::array<std::array<double, 2>, 2>& frozen_cross_w) {
  const double gth = cfg.gamma_threshold();
  const double eps2 = ch.sigma_eps_sq;
  const double n = ch.noise_w;
  const double qmax = cfg.q_max_w();
  const int steps = static_cast<int>(std::round(1.0 / spec.resolution));

  std::array<GridResultP2m, 2> out{};
  for (int m = 0; m < 2; ++m) {
    const double q = q_rsu_w[m];
    const double i1 = frozen_cross_w[m][0];
    const double i2 = frozen_cross_w[m][1];
    const double tb1 = ch.g_tag_veh[m][0] * ch.g_rsu_tag[m];
    const double tb2 = ch.g_tag_veh[m][1] * ch.g_rsu_tag[m];
    GridResultP2m& best = out[m];
    for (int i = 0; i <= steps; ++i) {
      const double b1 = i * spec.resolution;
      for (int j = 0; j <= steps; ++j) {
        const double b2 = j * spec.resolution;
        const double sum = b1 + b2;
        if (sum > 1.0) break;               // coefficient sum
        if (q * sum > qmax) break;          // RSU budget
        const double power = q * sum;
        if (power >= best.power_w) continue;  // cannot improve; xi is free
        for (int k = 0; k <= steps; ++k) {
          const double xi = k * spec.resolution;
          const double icsi = eps2 * (q * sum + xi);
          const double u1 = ch.g_rsu_veh[m][0] + xi * tb1;
          const double u2 = ch.g_rsu_veh[m][1] + xi * tb2;
          if (q * b1 * u1 < gth * (icsi + i1 + n)) continue;  // strong vehicle rate floor
          const double pi_2m = q * b1 * u2;
          if (q * b2 * u2 < gth * (pi_2m + icsi + i2 + n)) continue;  // weak vehicle rate floor
          best.feasible = true;
          best.b1 = b1;
          best.b2 = b2;
          best.xi = xi;
          best.power_w = power;
          break;  // smallest xi for this (b1, b2); power cannot improve in xi
        }
      }
    }
  }
  return out;
}

}  // namespace bnoma

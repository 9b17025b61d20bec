#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "bnoma/config.hpp"
#include "bnoma/placement.hpp"
#include "bnoma/rng.hpp"
#include "bnoma/units.hpp"

namespace bnoma {

// Power gain of one link: Rayleigh fading power |H|^2 times d^-zeta.
// fading_power is an exponential(1) draw.
inline double path_gain(double fading_power, double distance_m, double zeta) {
  if (!(distance_m >= kMinLinkDistance))
    throw std::invalid_argument("path_gain: distance below 1 m");
  if (!(fading_power >= 0.0))
    throw std::invalid_argument("path_gain: fading_power must be >= 0");
  return fading_power * std::pow(distance_m, -zeta);
}

// MMSE split h = h_hat + eps with eps ~ N(0, sigma_eps^2), uncorrelated with
// h_hat. The SINR model consumes only |h_hat|^2 and sigma_eps^2; the error
// realization is exposed for diagnostics but never enters a rate expression.
struct CsiSplit {
  double estimated_gain;
  double error_sample;
  double error_variance;
};

inline CsiSplit split_csi(double true_gain, double sigma_eps, Rng& rng) {
  const double err = sigma_eps * rng.normal();
  return {true_gain, err, sigma_eps * sigma_eps};
}

// One draw of all estimated channel power gains, relabeled so the NOMA
// decoding order holds: g_bs_rsu[0] > g_bs_rsu[1] and, per RSU,
// g_rsu_veh[m][0] > g_rsu_veh[m][1].
struct ChannelRealization {
  std::array<double, 2> g_bs_rsu{};                  // |h_m|^2
  std::array<std::array<double, 2>, 2> g_rsu_veh{};  // |h_{i,m}|^2
  std::array<std::array<double, 2>, 2> g_tag_veh{};  // |h^b_{i,m}|^2
  std::array<double, 2> g_rsu_tag{};                 // |h_{b,m}|^2
  std::array<std::array<double, 2>, 2> g_cross{};    // |h^{m'}_{i,m}|^2
  double sigma_eps_sq = 0.0;
  double noise_w = 0.0;
};

// Samples geometry and fading for every link and assembles the realization.
// The per-link draw order is fixed; all transforms consume a fixed number of
// uniforms, so a (config, seed) pair reproduces bit-identical output.
inline ChannelRealization generate_realization(const NetworkConfig& cfg, Rng& rng,
                                               Placement* placement_out = nullptr) {
  const Placement p = sample_placement(cfg, rng);
  const double zeta = cfg.pathloss_exp;
  // log-distance reference intercept: gain = |H|^2 (d/d0)^-zeta
  const double ref = std::pow(cfg.ref_distance_m, zeta);

  auto link = [&](double dist) {
    const double g = ref * path_gain(rng.exponential(), dist, zeta);
    return split_csi(g, cfg.sigma_eps, rng).estimated_gain;
  };

  ChannelRealization ch;
  for (int m = 0; m < 2; ++m) ch.g_bs_rsu[m] = link(p.d_bs_rsu(m));
  for (int m = 0; m < 2; ++m) {
    for (int i = 0; i < 2; ++i) ch.g_rsu_veh[m][i] = link(p.d_rsu_vehicle(m, i));
    ch.g_rsu_tag[m] = link(p.d_rsu_tag(m));
    for (int i = 0; i < 2; ++i) ch.g_tag_veh[m][i] = link(p.d_tag_vehicle(m, i));
    for (int i = 0; i < 2; ++i) ch.g_cross[m][i] = link(p.d_cross(m, i));
  }

  // Relabel RSUs so g_bs_rsu[0] > g_bs_rsu[1]. Whole per-RSU blocks move
  // together; with two RSUs the cross-link blocks swap consistently.
  if (ch.g_bs_rsu[0] < ch.g_bs_rsu[1]) {
    std::swap(ch.g_bs_rsu[0], ch.g_bs_rsu[1]);
    std::swap(ch.g_rsu_veh[0], ch.g_rsu_veh[1]);
    std::swap(ch.g_tag_veh[0], ch.g_tag_veh[1]);
    std::swap(ch.g_rsu_tag[0], ch.g_rsu_tag[1]);
    std::swap(ch.g_cross[0], ch.g_cross[1]);
  }
  // Relabel vehicles within each RSU; per-vehicle arrays follow.
  for (int m = 0; m < 2; ++m) {
    if (ch.g_rsu_veh[m][0] < ch.g_rsu_veh[m][1]) {
      std::swap(ch.g_rsu_veh[m][0], ch.g_rsu_veh[m][1]);
      std::swap(ch.g_tag_veh[m][0], ch.g_tag_veh[m][1]);
      std::swap(ch.g_cross[m][0], ch.g_cross[m][1]);
    }
  }

  ch.sigma_eps_sq = cfg.sigma_eps * cfg.sigma_eps;
  ch.noise_w = dbm_to_watt(cfg.noise_density_dbm) * cfg.bandwidth_hz;
  if (placement_out) *placement_out = p;
  return ch;
}

}  // namespace bnoma

#pragma once

#include <array>

#include "bnoma/channel.hpp"
#include "bnoma/config.hpp"

namespace bnoma {

// Multipliers of sub-problem P1 (BS power allocation).
struct DualStateP1 {
  double psi1 = 0.0;     // rate constraint of RSU 1
  double psi2 = 0.0;     // rate constraint of RSU 2
  double lambda1 = 0.0;  // BS power budget
  double lambda2 = 0.0;  // coefficient sum
  int iteration = 0;
};

// Multipliers of sub-problem P2 for one RSU.
struct DualStateP2m {
  double eta1 = 0.0;     // rate constraint of the strong vehicle
  double eta2 = 0.0;     // rate constraint of the weak vehicle
  double mu = 0.0;       // RSU power budget
  double zeta_mul = 0.0; // coefficient sum
  double upsilon = 0.0;  // reflection bound
};

struct DualStateP2 {
  std::array<DualStateP2m, 2> rsu{};
  int iteration = 0;
};

// Quantities held fixed during one pass of the P2 sub-gradient updates and
// re-derived by the outer loop: nominal RSU power, inter-RSU interference
// per vehicle, and the NOMA interference term.
struct P2Frozen {
  double q_w = 0.0;
  double i1_w = 0.0;
  double i2_w = 0.0;
  double pi_w = 0.0;
};

// ----- P1: minimize P(a1+a2) subject to the two RSU rate floors, the BS
// budget, and the coefficient sum -------------------------------------------

// Signed constraint slacks in their natural (watt / dimensionless) form;
// the multiplier ascent steps along their negatives.
struct P1Slacks {
  double rate1 = 0.0;   // g1*P*a1 - gth*(P*eps2*(a1+a2) + n)
  double rate2 = 0.0;   // g2*P*a2 - gth*(g2*P*a1 + P*eps2*(a1+a2) + n)
  double budget = 0.0;  // Pmax - P*(a1+a2)
  double coeff = 0.0;   // 1 - (a1+a2)
};

inline P1Slacks p1_slacks(const std::array<double, 2>& alpha,
                          const ChannelRealization& ch, const NetworkConfig& cfg) {
  const double p = cfg.p_max_w();
  const double gth = cfg.gamma_threshold();
  const double sum = alpha[0] + alpha[1];
  const double icsi = p * ch.sigma_eps_sq * sum;
  P1Slacks s;
  s.rate1 = ch.g_bs_rsu[0] * p * alpha[0] - gth * (icsi + ch.noise_w);
  s.rate2 = ch.g_bs_rsu[1] * p * alpha[1] -
         gth * (ch.g_bs_rsu[1] * p * alpha[0] + icsi + ch.noise_w);
  s.budget = cfg.p_max_w() - p * sum;
  s.coeff = 1.0 - sum;
  return s;
}

inline double lagrangian_p1(const std::array<double, 2>& alpha,
                            const DualStateP1& duals, const ChannelRealization& ch,
                            const NetworkConfig& cfg) {
  const double p = cfg.p_max_w();
  const P1Slacks s = p1_slacks(alpha, ch, cfg);
  return p * (alpha[0] + alpha[1]) - duals.psi1 * s.rate1 - duals.psi2 * s.rate2 -
         duals.lambda1 * s.budget - duals.lambda2 * s.coeff;
}

// Analytic partial derivatives of L1 with respect to a1 and a2.
inline std::array<double, 2> grad_p1(const std::array<double, 2>& alpha,
                                     const DualStateP1& duals,
                                     const ChannelRealization& ch,
                                     const NetworkConfig& cfg) {
  (void)alpha;  // L1 is linear in alpha
  const double p = cfg.p_max_w();
  const double gth = cfg.gamma_threshold();
  const double eps_p = p * ch.sigma_eps_sq;
  const double g1p = ch.g_bs_rsu[0] * p;
  const double g2p = ch.g_bs_rsu[1] * p;
  const double d1 = p + duals.lambda1 * p + gth * duals.psi2 * (g2p + eps_p) +
                    duals.psi1 * (gth * eps_p - g1p) + duals.lambda2;
  const double d2 = p + duals.lambda1 * p + gth * duals.psi1 * eps_p +
                    duals.psi2 * (gth * eps_p - g2p) + duals.lambda2;
  return {d1, d2};
}

// ----- P2 (per RSU m): minimize Q(b1+b2) subject to the vehicle rate
// floors, the RSU budget, the coefficient sum, and the reflection bound -----

struct P2Slacks {
  double rate1 = 0.0;     // Q*b1*u1 - gth*(eps2*(Q*(b1+b2)+xi) + I1 + n)
  double rate2 = 0.0;     // Q*b2*u2 - gth*(Pi + eps2*(Q*(b1+b2)+xi) + I2 + n)
  double budget = 0.0;    // Qmax - Q*(b1+b2)
  double coeff = 0.0;     // 1 - (b1+b2)
  double xi_bound = 0.0;  // 1 - xi
};

inline P2Slacks p2_slacks(double b1, double b2, double xi, int m,
                          const P2Frozen& frozen, const ChannelRealization& ch,
                          const NetworkConfig& cfg) {
  const double gth = cfg.gamma_threshold();
  const double q = frozen.q_w;
  const double eps2 = ch.sigma_eps_sq;
  const double u1 = ch.g_rsu_veh[m][0] + xi * ch.g_tag_veh[m][0] * ch.g_rsu_tag[m];
  const double u2 = ch.g_rsu_veh[m][1] + xi * ch.g_tag_veh[m][1] * ch.g_rsu_tag[m];
  const double icsi = eps2 * (q * (b1 + b2) + xi);
  P2Slacks s;
  s.rate1 = q * b1 * u1 - gth * (icsi + frozen.i1_w + ch.noise_w);
  s.rate2 = q * b2 * u2 - gth * (frozen.pi_w + icsi + frozen.i2_w + ch.noise_w);
  s.budget = cfg.q_max_w() - q * (b1 + b2);
  s.coeff = 1.0 - (b1 + b2);
  s.xi_bound = 1.0 - xi;
  return s;
}

inline double lagrangian_p2(double b1, double b2, double xi,
                            const DualStateP2m& duals, int m, const P2Frozen& frozen,
                            const ChannelRealization& ch, const NetworkConfig& cfg) {
  const P2Slacks s = p2_slacks(b1, b2, xi, m, frozen, ch, cfg);
  return frozen.q_w * (b1 + b2) - duals.eta1 * s.rate1 - duals.eta2 * s.rate2 -
         duals.mu * s.budget - duals.zeta_mul * s.coeff - duals.upsilon * s.xi_bound;
}

// Analytic partial derivatives of L2 with respect to (b1, b2, xi), holding
// the re-derived interference terms fixed.
inline std::array<double, 3> grad_p2(double b1, double b2, double xi,
                                     const DualStateP2m& duals, int m,
                                     const P2Frozen& frozen,
                                     const ChannelRealization& ch,
                                     const NetworkConfig& cfg) {
  const double gth = cfg.gamma_threshold();
  const double q = frozen.q_w;
  const double eps2 = ch.sigma_eps_sq;
  const double t1 = ch.g_tag_veh[m][0] * ch.g_rsu_tag[m];
  const double t2 = ch.g_tag_veh[m][1] * ch.g_rsu_tag[m];
  const double u1 = ch.g_rsu_veh[m][0] + xi * t1;
  const double u2 = ch.g_rsu_veh[m][1] + xi * t2;
  const double eta_eps = gth * (duals.eta1 + duals.eta2) * eps2;
  const double d_b1 = q * (1.0 - duals.eta1 * u1 + eta_eps + duals.mu) + duals.zeta_mul;
  const double d_b2 = q * (1.0 - duals.eta2 * u2 + eta_eps + duals.mu) + duals.zeta_mul;
  const double d_xi =
      -duals.eta1 * q * b1 * t1 - duals.eta2 * q * b2 * t2 + eta_eps + duals.upsilon;
  return {d_b1, d_b2, d_xi};
}

}  // namespace bnoma

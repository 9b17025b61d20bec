#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bnoma/rate_model.hpp"
#include "bnoma/rng.hpp"

using namespace bnoma;

namespace {

// Independent single-expression transcriptions of the SINR formulas. These
// deliberately do not reuse the library helpers.
double oracle_gamma1(double g1, double p, double a1, double a2, double eps2,
                     double n) {
  return g1 * p * a1 / (p * eps2 * (a1 + a2) + n);
}
double oracle_gamma2(double g2, double p, double a1, double a2, double eps2,
                     double n) {
  return g2 * p * a2 / (g2 * p * a1 + p * eps2 * (a1 + a2) + n);
}
double oracle_gamma_1m(double q, double b1, double b2, double g1m, double tb1,
                       double tbm, double xi, double eps2, double inter,
                       double n) {
  return q * b1 * (g1m + xi * tb1 * tbm) /
         (eps2 * (q * (b1 + b2) + xi) + inter + n);
}
double oracle_gamma_2m(double q, double b1, double b2, double g2m, double tb2,
                       double tbm, double xi, double eps2, double inter,
                       double n) {
  const double pi_2m = q * b1 * (g2m + xi * tb2 * tbm);
  return q * b2 * (g2m + xi * tb2 * tbm) /
         (pi_2m + eps2 * (q * (b1 + b2) + xi) + inter + n);
}

ChannelRealization tiny_channel() {
  ChannelRealization ch;
  ch.g_bs_rsu = {1e-8, 5e-9};
  ch.g_rsu_veh = {{{4e-7, 1e-7}, {3e-7, 6e-8}}};
  ch.g_tag_veh = {{{2e-7, 9e-8}, {1e-7, 5e-8}}};
  ch.g_rsu_tag = {3e-7, 2e-7};
  ch.g_cross = {{{2e-9, 1e-9}, {3e-9, 2e-9}}};
  ch.sigma_eps_sq = 1e-6;
  ch.noise_w = 1e-14;
  return ch;
}

PowerSolution base_solution() {
  PowerSolution sol;
  sol.p_bs_w = 10.0;
  sol.alpha = {0.2, 0.8};
  sol.q_rsu_w = {4.0, 4.0};
  sol.beta = {{{0.3, 0.6}, {0.25, 0.7}}};
  sol.xi = {0.5, 0.9};
  return sol;
}

ChannelRealization random_channel(Rng& rng) {
  ChannelRealization ch;
  auto g = [&] { return std::pow(10.0, rng.uniform(-9.0, 0.0)); };
  ch.g_bs_rsu = {g(), g()};
  if (ch.g_bs_rsu[0] < ch.g_bs_rsu[1]) std::swap(ch.g_bs_rsu[0], ch.g_bs_rsu[1]);
  for (int m = 0; m < 2; ++m) {
    ch.g_rsu_veh[m] = {g(), g()};
    if (ch.g_rsu_veh[m][0] < ch.g_rsu_veh[m][1])
      std::swap(ch.g_rsu_veh[m][0], ch.g_rsu_veh[m][1]);
    ch.g_tag_veh[m] = {g(), g()};
    ch.g_rsu_tag[m] = g();
    ch.g_cross[m] = {g(), g()};
  }
  ch.sigma_eps_sq = std::pow(10.0, rng.uniform(-12.0, -4.0));
  ch.noise_w = 1e-14;
  return ch;
}

PowerSolution random_solution(Rng& rng) {
  PowerSolution sol;
  sol.p_bs_w = rng.uniform(0.1, 40.0);
  const double a1 = rng.uniform(0.0, 1.0);
  sol.alpha = {a1, rng.uniform(0.0, 1.0 - a1)};
  for (int m = 0; m < 2; ++m) {
    sol.q_rsu_w[m] = rng.uniform(0.1, 20.0);
    const double b1 = rng.uniform(0.0, 1.0);
    sol.beta[m] = {b1, rng.uniform(0.0, 1.0 - b1)};
    sol.xi[m] = rng.uniform(0.0, 1.0);
  }
  return sol;
}

}  // namespace

TEST_CASE("first-hop SINR edge cases") {
  ChannelRealization ch = tiny_channel();
  PowerSolution sol = base_solution();

  SECTION("no transmit power") {
    sol.alpha = {0.0, 0.0};
    const auto [g1, g2] = sinr_first_hop(ch, sol);
    CHECK(g1 == 0.0);
    CHECK(g2 == 0.0);
  }
  SECTION("unit SNR construction") {
    ch.sigma_eps_sq = 0.0;
    sol.p_bs_w = 10.0;
    sol.alpha = {1.0, 0.0};
    ch.g_bs_rsu[0] = ch.noise_w / sol.p_bs_w;
    const auto [g1, g2] = sinr_first_hop(ch, sol);
    CHECK(g1 == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(g2 == 0.0);
  }
}

TEST_CASE("first-hop SINR matches the hand-evaluated expression") {
  const ChannelRealization ch = tiny_channel();
  const PowerSolution sol = base_solution();
  const auto [g1, g2] = sinr_first_hop(ch, sol);
  CHECK(g1 == Catch::Approx(oracle_gamma1(1e-8, 10.0, 0.2, 0.8, 1e-6, 1e-14))
                  .epsilon(1e-12));
  CHECK(g2 == Catch::Approx(oracle_gamma2(5e-9, 10.0, 0.2, 0.8, 1e-6, 1e-14))
                  .epsilon(1e-12));
}

TEST_CASE("second-hop SINR reduces to pure NOMA when xi is zero") {
  ChannelRealization ch = tiny_channel();
  PowerSolution sol = base_solution();
  sol.xi = {0.0, 0.0};
  const auto base = sinr_second_hop(ch, sol, 0);
  // perturb every tag gain; results must be bitwise identical
  for (int m = 0; m < 2; ++m) {
    ch.g_rsu_tag[m] *= 1e6;
    for (int i = 0; i < 2; ++i) ch.g_tag_veh[m][i] *= 1e6;
  }
  const auto perturbed = sinr_second_hop(ch, sol, 0);
  CHECK(base.first == perturbed.first);
  CHECK(base.second == perturbed.second);
}

TEST_CASE("second-hop SINR of a silent RSU is zero") {
  ChannelRealization ch = tiny_channel();
  PowerSolution sol = base_solution();
  sol.beta[1] = {0.0, 0.0};
  sol.xi[1] = 0.0;
  const auto [g1, g2] = sinr_second_hop(ch, sol, 1);
  CHECK(g1 == 0.0);
  CHECK(g2 == 0.0);
}

TEST_CASE("first-hop SINR matches the independent expression on random instances") {
  Rng rng(1618);
  for (int k = 0; k < 1000; ++k) {
    const ChannelRealization ch = random_channel(rng);
    const PowerSolution sol = random_solution(rng);
    const auto [g1, g2] = sinr_first_hop(ch, sol);
    const double o1 = oracle_gamma1(ch.g_bs_rsu[0], sol.p_bs_w, sol.alpha[0],
                                    sol.alpha[1], ch.sigma_eps_sq, ch.noise_w);
    const double o2 = oracle_gamma2(ch.g_bs_rsu[1], sol.p_bs_w, sol.alpha[0],
                                    sol.alpha[1], ch.sigma_eps_sq, ch.noise_w);
    CHECK(g1 == Catch::Approx(o1).epsilon(1e-12));
    CHECK(g2 == Catch::Approx(o2).epsilon(1e-12));
  }
}

TEST_CASE("second-hop SINR matches the independent expression on random instances") {
  Rng rng(314);
  for (int k = 0; k < 1000; ++k) {
    const ChannelRealization ch = random_channel(rng);
    const PowerSolution sol = random_solution(rng);
    for (int m = 0; m < 2; ++m) {
      const double inter1 =
          ch.g_cross[m][0] * sol.q_rsu_w[1 - m] * (sol.beta[1 - m][0] + sol.beta[1 - m][1]);
      const double inter2 =
          ch.g_cross[m][1] * sol.q_rsu_w[1 - m] * (sol.beta[1 - m][0] + sol.beta[1 - m][1]);
      const auto [g1, g2] = sinr_second_hop(ch, sol, m);
      const double o1 = oracle_gamma_1m(sol.q_rsu_w[m], sol.beta[m][0], sol.beta[m][1],
                                        ch.g_rsu_veh[m][0], ch.g_tag_veh[m][0],
                                        ch.g_rsu_tag[m], sol.xi[m], ch.sigma_eps_sq,
                                        inter1, ch.noise_w);
      const double o2 = oracle_gamma_2m(sol.q_rsu_w[m], sol.beta[m][0], sol.beta[m][1],
                                        ch.g_rsu_veh[m][1], ch.g_tag_veh[m][1],
                                        ch.g_rsu_tag[m], sol.xi[m], ch.sigma_eps_sq,
                                        inter2, ch.noise_w);
      CHECK(g1 == Catch::Approx(o1).epsilon(1e-12));
      CHECK(g2 == Catch::Approx(o2).epsilon(1e-12));
    }
  }
}

TEST_CASE("rate closed forms") {
  CHECK(rate(0.0, 0.5) == 0.0);
  CHECK(rate(1.0, 0.5) == Catch::Approx(0.5));
  CHECK(rate(3.0, 0.5) == Catch::Approx(1.0));
}

TEST_CASE("gamma1 is nondecreasing in alpha1 at fixed alpha2") {
  const ChannelRealization ch = tiny_channel();
  PowerSolution sol = base_solution();
  double prev = -1.0;
  for (double a1 = 0.0; a1 <= 0.5; a1 += 0.05) {
    sol.alpha[0] = a1;
    const double g1 = sinr_first_hop(ch, sol).first;
    CHECK(g1 >= prev);
    prev = g1;
  }
}

TEST_CASE("end-to-end rates take min then halve") {
  ChannelRealization ch = tiny_channel();
  PowerSolution sol = base_solution();
  const RateReport r = end_to_end_rates(ch, sol);
  const std::array<double, 2> hop1{r.c1, r.c2};
  double sum = 0.0;
  for (int m = 0; m < 2; ++m) {
    for (int i = 0; i < 2; ++i) {
      CHECK(r.e2e[m][i] ==
            Catch::Approx(0.5 * std::min(hop1[m], r.c_veh[m][i])).epsilon(1e-12));
      CHECK(r.e2e[m][i] <= std::min(hop1[m], r.c_veh[m][i]));
      sum += r.e2e[m][i];
    }
  }
  CHECK(r.sum_rate == Catch::Approx(sum).epsilon(1e-12));
}

TEST_CASE("end-to-end sum recomputes from independently summed minima") {
  Rng rng(6021023);
  for (int k = 0; k < 1000; ++k) {
    const ChannelRealization ch = random_channel(rng);
    const PowerSolution sol = random_solution(rng);
    const RateReport r = end_to_end_rates(ch, sol);
    // independent route: straight from the SINR helpers
    const auto [h1, h2] = sinr_first_hop(ch, sol);
    const std::array<double, 2> hop1{0.5 * std::log2(1.0 + h1),
                                     0.5 * std::log2(1.0 + h2)};
    double sum = 0.0;
    for (int m = 0; m < 2; ++m) {
      const auto [v1, v2] = sinr_second_hop(ch, sol, m);
      sum += 0.5 * std::min(hop1[m], 0.5 * std::log2(1.0 + v1));
      sum += 0.5 * std::min(hop1[m], 0.5 * std::log2(1.0 + v2));
    }
    CHECK(r.sum_rate == Catch::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("circuit power constant from the scenario table") {
  NetworkConfig cfg;  // 5 dBm default
  CHECK(cfg.circuit_power_w() == Catch::Approx(3.1623e-3).epsilon(1e-4));
}

TEST_CASE("end-to-end rates vanish with all powers off") {
  ChannelRealization ch = tiny_channel();
  PowerSolution sol;
  sol.p_bs_w = 10.0;
  sol.q_rsu_w = {4.0, 4.0};
  const RateReport r = end_to_end_rates(ch, sol);
  CHECK(r.sum_rate == 0.0);
}

TEST_CASE("total_power arithmetic") {
  PowerSolution sol;
  CHECK(total_power(sol) == 0.0);
  sol.p_bs_w = 10.0;
  sol.alpha = {0.3, 0.5};
  sol.q_rsu_w = {4.0, 4.0};
  sol.beta = {{{0.25, 0.25}, {0.25, 0.25}}};
  CHECK(total_power(sol) == Catch::Approx(12.0).epsilon(1e-12));
}

TEST_CASE("energy efficiency unit construction") {
  NetworkConfig cfg;
  cfg.bandwidth_hz = 1e6;
  RateReport r;
  r.sum_rate = 1.0;
  PowerSolution sol;
  // pick powers so total consumption is exactly 1 W
  sol.p_bs_w = 1.0 - cfg.circuit_power_w();
  sol.alpha = {1.0, 0.0};
  CHECK(energy_efficiency(r, sol, cfg) == Catch::Approx(1.0).epsilon(1e-12));

  r.sum_rate = 0.0;
  CHECK(energy_efficiency(r, sol, cfg) == 0.0);
}

TEST_CASE("energy efficiency decreases with circuit power") {
  NetworkConfig lo, hi;
  lo.circuit_power_dbm = 2.0;
  hi.circuit_power_dbm = 11.0;
  RateReport r;
  r.sum_rate = 0.5;
  PowerSolution sol = base_solution();
  CHECK(energy_efficiency(r, sol, lo) > energy_efficiency(r, sol, hi));
}

TEST_CASE("icsi interference closed behavior") {
  ChannelRealization ch = tiny_channel();
  PowerSolution sol = base_solution();

  SECTION("zero for perfect CSI") {
    ch.sigma_eps_sq = 0.0;
    CHECK(icsi_interference(ch, sol) == 0.0);
  }
  SECTION("increases when powers double") {
    const double base = icsi_interference(ch, sol);
    PowerSolution doubled = sol;
    doubled.p_bs_w *= 2.0;
    doubled.q_rsu_w = {sol.q_rsu_w[0] * 2.0, sol.q_rsu_w[1] * 2.0};
    CHECK(icsi_interference(ch, doubled) > base);
  }
  SECTION("scales exactly with sigma_eps_sq") {
    ch.sigma_eps_sq = 1e-10;
    const double lo = icsi_interference(ch, sol);
    ch.sigma_eps_sq = 1e-8;
    const double hi = icsi_interference(ch, sol);
    CHECK(hi / lo == Catch::Approx(100.0).epsilon(1e-9));
  }
}

TEST_CASE("perfect CSI recovers the no-error SINRs exactly") {
  Rng rng(2718);
  for (int k = 0; k < 200; ++k) {
    ChannelRealization ch = random_channel(rng);
    const PowerSolution sol = random_solution(rng);
    ch.sigma_eps_sq = 0.0;
    const auto [g1, g2] = sinr_first_hop(ch, sol);
    const double d1 = ch.g_bs_rsu[0] * sol.p_bs_w * sol.alpha[0] / ch.noise_w;
    const double d2 = ch.g_bs_rsu[1] * sol.p_bs_w * sol.alpha[1] /
                      (ch.g_bs_rsu[1] * sol.p_bs_w * sol.alpha[0] + ch.noise_w);
    CHECK(g1 == d1);
    CHECK(g2 == d2);
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "bnoma/channel.hpp"
#include "bnoma/oracle.hpp"
#include "bnoma/rng.hpp"
#include "bnoma/solver.hpp"

using namespace bnoma;

namespace {

ChannelRealization seeded_channel(const NetworkConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  return generate_realization(cfg, rng);
}

}  // namespace

TEST_CASE("grid_search_p1 returns the zero corner when constraints vanish") {
  NetworkConfig cfg;
  cfg.c_min = 1e-300;  // gamma threshold underflows to 0
  const ChannelRealization ch = seeded_channel(cfg, 1);
  const GridResultP1 r = grid_search_p1(ch, cfg, GridSpec{1e-2});
  REQUIRE(r.feasible);
  CHECK(r.alpha[0] == 0.0);
  CHECK(r.alpha[1] == 0.0);
  CHECK(r.power_w == 0.0);
}

TEST_CASE("grid_search_p1 agrees with the analytic boundary construction") {
  // sigma_eps = 0 and hand-picked gains: the rate-constraint equality point is
  // alpha1* = gth*n/(g1*P), alpha2* = gth*(g2*P*alpha1* + n)/(g2*P).
  NetworkConfig cfg;
  cfg.sigma_eps = 0.0;
  const double p = cfg.p_max_w();
  const double gth = cfg.gamma_threshold();
  const double n = 1e-14;

  ChannelRealization ch;
  ch.noise_w = n;
  ch.sigma_eps_sq = 0.0;
  // choose gains so the boundary lands mid-grid
  ch.g_bs_rsu[0] = gth * n / (0.30 * p);  // alpha1* = 0.30
  const double a1 = 0.30;
  ch.g_bs_rsu[1] = gth * n / ((0.52 - gth * a1) * p);  // alpha2* = 0.52

  const double a2 = gth * (ch.g_bs_rsu[1] * p * a1 + n) / (ch.g_bs_rsu[1] * p);
  REQUIRE(a2 == Catch::Approx(0.52).margin(1e-12));

  const double res = 1e-2;
  const GridResultP1 r = grid_search_p1(ch, cfg, GridSpec{res});
  REQUIRE(r.feasible);
  CHECK(std::abs(r.alpha[0] - a1) <= res + 1e-12);
  CHECK(std::abs(r.alpha[1] - a2) <= res + 1e-12);
  CHECK(r.power_w <= p * (a1 + a2 + 2 * res) + 1e-12);
}

TEST_CASE("grid_search_p1 optimum is monotone in resolution") {
  NetworkConfig cfg;
  const ChannelRealization ch = seeded_channel(cfg, 7);
  const GridResultP1 coarse = grid_search_p1(ch, cfg, GridSpec{2e-2});
  const GridResultP1 fine = grid_search_p1(ch, cfg, GridSpec{1e-2});
  REQUIRE(coarse.feasible);
  REQUIRE(fine.feasible);
  CHECK(fine.power_w <= coarse.power_w + 1e-15);
}

TEST_CASE("grid searches are deterministic") {
  NetworkConfig cfg;
  const ChannelRealization ch = seeded_channel(cfg, 6);
  const GridResultP1 a = grid_search_p1(ch, cfg, GridSpec{5e-3});
  const GridResultP1 b = grid_search_p1(ch, cfg, GridSpec{5e-3});
  CHECK(a.alpha == b.alpha);
  CHECK(a.power_w == b.power_w);
  const std::array<double, 2> q{8.0, 8.0};
  const std::array<std::array<double, 2>, 2> cross{{{1e-9, 1e-9}, {1e-9, 1e-9}}};
  const auto ra = grid_search_p2(ch, cfg, GridSpec{5e-2}, q, cross);
  const auto rb = grid_search_p2(ch, cfg, GridSpec{5e-2}, q, cross);
  for (int m = 0; m < 2; ++m) {
    CHECK(ra[m].b1 == rb[m].b1);
    CHECK(ra[m].b2 == rb[m].b2);
    CHECK(ra[m].xi == rb[m].xi);
  }
}

TEST_CASE("grid_search_p1 reports infeasibility when no grid point passes") {
  NetworkConfig cfg;
  cfg.c_min = 30.0;
  cfg.sigma_eps = 0.01;
  const ChannelRealization ch = seeded_channel(cfg, 2);
  const GridResultP1 r = grid_search_p1(ch, cfg, GridSpec{1e-2});
  CHECK_FALSE(r.feasible);
}

TEST_CASE("solver and P1 oracle agree within the grid allowance") {
  NetworkConfig cfg;
  SolverSettings st = SolverSettings::from_config(cfg);
  const double res = 1e-3;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ChannelRealization ch = seeded_channel(cfg, seed);
    const SolveOutcome out = solve_p1(ch, cfg, st);
    const GridResultP1 oracle = grid_search_p1(ch, cfg, GridSpec{res});
    REQUIRE(out.status == SolveStatus::converged);
    REQUIRE(oracle.feasible);
    const double solver_power = out.solution.p_bs_w * out.solution.alpha_sum();
    const double allowance =
        std::max(0.02 * oracle.power_w, 2.0 * res * cfg.p_max_w());
    CHECK(std::abs(solver_power - oracle.power_w) <= allowance * (1.0 + 1e-9));
    // the grid point can never beat the continuous optimum by construction
    CHECK((oracle.power_w >= solver_power * (1.0 - 1e-9) ||
           oracle.power_w + allowance >= solver_power));
  }
}

TEST_CASE("grid_search_p2 with zero tag gains ignores the xi axis") {
  NetworkConfig cfg;
  ChannelRealization ch = seeded_channel(cfg, 3);
  for (int m = 0; m < 2; ++m) {
    ch.g_rsu_tag[m] = 0.0;
    ch.g_tag_veh[m] = {0.0, 0.0};
  }
  const std::array<double, 2> q{8.0, 8.0};
  const std::array<std::array<double, 2>, 2> cross{{{1e-9, 1e-9}, {1e-9, 1e-9}}};
  const auto r = grid_search_p2(ch, cfg, GridSpec{2e-2}, q, cross);
  for (int m = 0; m < 2; ++m) {
    REQUIRE(r[m].feasible);
    CHECK(r[m].xi == 0.0);  // lexicographic tie-break picks the smallest xi
  }
}

TEST_CASE("grid_search_p2 reaches the zero optimum as c_min vanishes") {
  NetworkConfig cfg;
  cfg.c_min = 1e-300;
  const ChannelRealization ch = seeded_channel(cfg, 4);
  const std::array<double, 2> q{8.0, 8.0};
  const std::array<std::array<double, 2>, 2> cross{{{0.0, 0.0}, {0.0, 0.0}}};
  const auto r = grid_search_p2(ch, cfg, GridSpec{2e-2}, q, cross);
  for (int m = 0; m < 2; ++m) {
    REQUIRE(r[m].feasible);
    CHECK(r[m].power_w == 0.0);
  }
}

TEST_CASE("solver and P2 oracle agree at frozen cross interference") {
  NetworkConfig cfg;
  SolverSettings st = SolverSettings::from_config(cfg);
  const double res = 2e-2;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const ChannelRealization ch = seeded_channel(cfg, seed);
    const SolveOutcome s1 = solve_p1(ch, cfg, st);
    REQUIRE(s1.status == SolveStatus::converged);
    const auto q = assign_q(s1.solution.alpha, cfg);
    const SolveOutcome out = solve_p2(ch, cfg, st, q, Mode::ambc);
    REQUIRE(out.status == SolveStatus::converged);

    std::array<std::array<double, 2>, 2> cross{};
    for (int m = 0; m < 2; ++m) {
      for (int i = 0; i < 2; ++i) {
        cross[m][i] = cross_interference_w(ch, out.solution, m, i);
      }
    }
    const auto oracle = grid_search_p2(ch, cfg, GridSpec{res}, q, cross);
    for (int m = 0; m < 2; ++m) {
      REQUIRE(oracle[m].feasible);
      const double solver_power = q[m] * out.solution.beta_sum(m);
      const double allowance = std::max(0.03 * oracle[m].power_w, 2.0 * res * q[m]);
      CHECK(std::abs(solver_power - oracle[m].power_w) <= allowance * (1.0 + 1e-9));
    }
  }
}

TEST_CASE("feasibility_check signs on hand-built solutions") {
  NetworkConfig cfg;
  const ChannelRealization ch = seeded_channel(cfg, 5);

  SECTION("all-zero solution violates the rate constraints only") {
    PowerSolution sol;
    sol.p_bs_w = cfg.p_max_w();
    sol.q_rsu_w = {1.0, 1.0};
    const ConstraintSlacks s = feasibility_check(sol, ch, cfg);
    CHECK(s.rate_rsu1 < 0.0);
    CHECK(s.rate_rsu2 < 0.0);
    CHECK(s.bs_budget_w >= 0.0);
    CHECK(s.bs_coeff >= 0.0);
    for (int m = 0; m < 2; ++m) {
      CHECK(s.rate_veh1[m] < 0.0);
      CHECK(s.rsu_budget_w[m] >= 0.0);
      CHECK(s.rsu_coeff[m] >= 0.0);
    }
  }

  SECTION("oracle points certify with nonnegative slacks") {
    const GridResultP1 r = grid_search_p1(ch, cfg, GridSpec{1e-3});
    REQUIRE(r.feasible);
    PowerSolution sol;
    sol.p_bs_w = cfg.p_max_w();
    sol.alpha = r.alpha;
    const ConstraintSlacks s = feasibility_check(sol, ch, cfg);
    CHECK(s.rate_rsu1 >= 0.0);
    CHECK(s.rate_rsu2 >= 0.0);
    CHECK(s.bs_budget_w >= 0.0);
    CHECK(s.bs_coeff >= 0.0);
  }
}

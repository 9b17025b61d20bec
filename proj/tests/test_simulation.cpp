#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bnoma/simulation.hpp"

using namespace bnoma;

TEST_CASE("run_realization pure NOMA pins the reflection coefficients") {
  NetworkConfig cfg;
  const auto [outcome, metrics] = run_realization(cfg, 42, Mode::pure_noma);
  REQUIRE(metrics.feasible);
  CHECK(outcome.solution.xi[0] == 0.0);
  CHECK(outcome.solution.xi[1] == 0.0);
}

TEST_CASE("run_realization is deterministic") {
  NetworkConfig cfg;
  const auto a = run_realization(cfg, 7, Mode::ambc);
  const auto b = run_realization(cfg, 7, Mode::ambc);
  CHECK(a.second.ee_mbpj == b.second.ee_mbpj);
  CHECK(a.second.icsi_w == b.second.icsi_w);
  CHECK(a.second.total_power_w == b.second.total_power_w);
  CHECK(a.first.solution.alpha == b.first.solution.alpha);
  CHECK(a.first.solution.beta == b.first.solution.beta);
}

TEST_CASE("paired seeds: AmBC never needs more power than pure NOMA") {
  NetworkConfig cfg;
  cfg.sigma_eps = 0.0;  // reflection is free of the iCSI tax here
  int checked = 0;
  for (std::uint64_t r = 0; r < 40; ++r) {
    const std::uint64_t seed = mix_seed(cfg.seed, r);
    const auto a = run_realization(cfg, seed, Mode::ambc);
    const auto n = run_realization(cfg, seed, Mode::pure_noma);
    if (!a.second.feasible || !n.second.feasible) continue;
    ++checked;
    CHECK(a.second.total_power_w <= n.second.total_power_w * (1.0 + 1e-12));
    CHECK(a.second.ee_mbpj >= n.second.ee_mbpj * (1.0 - 1e-12));
  }
  CHECK(checked >= 35);
}

TEST_CASE("sweep plan validation") {
  SweepPlan plan;
  plan.values = {};
  CHECK_THROWS_AS(plan.validate(), ConfigError);
  plan.values = {1.0, 3.0, 2.0};
  CHECK_THROWS_AS(plan.validate(), ConfigError);
  plan.values = {3.0, 2.0, 1.0};  // descending is fine
  plan.realizations = 1;
  CHECK_NOTHROW(plan.validate());
  plan.realizations = 0;
  CHECK_THROWS_AS(plan.validate(), ConfigError);
  plan.realizations = 4;
  plan.run_ambc = plan.run_pure_noma = false;
  CHECK_THROWS_AS(plan.validate(), ConfigError);
}

TEST_CASE("perfect-CSI sweep point reports exactly zero icsi interference") {
  SweepPlan plan;
  plan.param = SweepParam::sigma_eps;
  plan.values = {0.0};
  plan.realizations = 25;
  const SweepResult result = run_sweep(plan, 2);
  for (const auto& p : result.points) {
    CHECK(p.mean_icsi_w == 0.0);
    CHECK(p.feasibility_rate == 1.0);
  }
}

TEST_CASE("parallel and serial sweeps agree bit for bit") {
  SweepPlan plan;
  plan.param = SweepParam::sigma_eps;
  plan.values = {1e-5, 1e-3};
  plan.realizations = 24;
  const SweepResult serial = run_sweep(plan, 1);
  const SweepResult parallel = run_sweep(plan, 4);
  REQUIRE(serial.points.size() == parallel.points.size());
  for (std::size_t i = 0; i < serial.points.size(); ++i) {
    CHECK(serial.points[i].mean_ee == parallel.points[i].mean_ee);
    CHECK(serial.points[i].stderr_ee == parallel.points[i].stderr_ee);
    CHECK(serial.points[i].mean_icsi_w == parallel.points[i].mean_icsi_w);
    CHECK(serial.points[i].feasibility_rate == parallel.points[i].feasibility_rate);
  }
}

TEST_CASE("sweeps with one master seed reproduce exactly") {
  SweepPlan plan;
  plan.param = SweepParam::rsu_radius;
  plan.values = {20.0, 10.0};
  plan.realizations = 16;
  const SweepResult a = run_sweep(plan, 2);
  const SweepResult b = run_sweep(plan, 2);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].mean_ee == b.points[i].mean_ee);
  }
}

TEST_CASE("feasibility holds on the default configuration up to sigma_eps 1e-3") {
  for (double eps : {0.0, 1e-4, 1e-3}) {
    SweepPlan plan;
    plan.param = SweepParam::sigma_eps;
    plan.values = {eps};
    plan.realizations = 150;
    const SweepResult result = run_sweep(plan, 2);
    for (const auto& p : result.points) {
      INFO("sigma_eps " << eps);
      CHECK(p.feasibility_rate == 1.0);
    }
  }
}

TEST_CASE("compare_modes reports paired dominance") {
  SweepPlan plan;
  plan.param = SweepParam::sigma_eps;
  plan.values = {0.0, 1e-4};
  plan.realizations = 60;
  const SweepResult result = run_sweep(plan, 2);
  const ModeComparison cmp = compare_modes(result);
  REQUIRE(cmp.points.size() == 2);
  for (const auto& p : cmp.points) {
    CHECK(p.n_pairs >= 55);
    CHECK(p.dominance_ok);
  }
  // at sigma_eps > 0 the reflection tax shuts the tag off and both modes
  // collapse to the same allocation
  CHECK(std::abs(cmp.points[1].diff_mean) <= cmp.points[1].diff_stderr + 1e-12);
}

TEST_CASE("compare_modes requires both mode columns") {
  SweepPlan plan;
  plan.values = {1e-4};
  plan.realizations = 2;
  plan.run_pure_noma = false;
  const SweepResult result = run_sweep(plan, 1);
  CHECK_THROWS_AS(compare_modes(result), std::invalid_argument);
}

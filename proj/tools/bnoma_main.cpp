// Command line front end: single solves, Monte Carlo parameter sweeps with
// CSV output, and the solver-vs-oracle verification suite.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bnoma/io.hpp"
#include "bnoma/oracle.hpp"
#include "bnoma/simulation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitIo = 4;
constexpr int kExitInfeasible = 5;

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  int threads = bnoma::default_thread_count();

  // optional field overrides; applied after the config file
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_config_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_path,
                  "configuration file (key = value lines or a manifest.json)");
  cmd->add_option("--out", opt.out_dir,
                  "output directory (default: $BNOMA_OUT_DIR or .)");
  cmd->add_option("--threads", opt.threads, "worker threads for sweeps")
      ->check(CLI::PositiveNumber);

  static const char* keys[] = {
      "p_max",        "q_max",          "sigma_eps",         "c_min",
      "pathloss_exp", "noise_density_dbm", "bandwidth_hz",   "circuit_power_dbm",
      "bs_radius_m",  "rsu_radius_m",   "ref_distance_m",    "n_realizations",
      "step_size_initial", "max_iterations", "convergence_tol"};
  for (const char* key : keys) {
    std::string flag = "--" + std::string(key);
    for (auto& c : flag)
      if (c == '_') c = '-';
    cmd->add_option_function<std::string>(
        flag,
        [&opt, key](const std::string& v) { opt.overrides.emplace_back(key, v); },
        std::string("override ") + key);
  }
}

bnoma::NetworkConfig resolve_config(const CliOptions& opt,
                                    std::optional<bnoma::PlanSpec>* plan_out) {
  bnoma::NetworkConfig cfg;
  if (!opt.config_path.empty()) {
    const bnoma::LoadedConfig loaded = bnoma::load_config_file(opt.config_path, cfg);
    cfg = loaded.config;
    if (plan_out) *plan_out = loaded.plan;
  }
  for (const auto& [key, value] : opt.overrides) {
    bnoma::detail::apply_config_value(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

std::string resolve_out_dir(const CliOptions& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (const char* env = std::getenv("BNOMA_OUT_DIR"); env && *env) return env;
  return ".";
}

void print_solution(const bnoma::SolveOutcome& out, const bnoma::NetworkConfig& cfg,
                    const bnoma::ChannelRealization& ch) {
  const bnoma::PowerSolution& sol = out.solution;
  const char* status = out.status == bnoma::SolveStatus::converged ? "CONVERGED"
                       : out.status == bnoma::SolveStatus::max_iterations
                           ? "MAX_ITERATIONS"
                           : "INFEASIBLE";
  std::printf("status           : %s (%d iterations)\n", status, out.iterations_used);
  if (out.status == bnoma::SolveStatus::infeasible) {
    std::printf("worst slack      : %.6g\n", out.slacks.min_slack());
    return;
  }
  std::printf("alpha*           : %.6e  %.6e\n", sol.alpha[0], sol.alpha[1]);
  for (int m = 0; m < 2; ++m) {
    std::printf("beta*  (RSU %d)   : %.6e  %.6e\n", m + 1, sol.beta[m][0],
                sol.beta[m][1]);
  }
  std::printf("xi*              : %.6f  %.6f\n", sol.xi[0], sol.xi[1]);
  const double power = bnoma::total_power(sol);
  std::printf("total power      : %.6e W (%.2f dBm)\n", power,
              bnoma::watt_to_dbm(power));
  const bnoma::RateReport report = bnoma::end_to_end_rates(ch, sol);
  std::printf("sum rate         : %.6f bps/Hz\n", report.sum_rate);
  std::printf("energy efficiency: %.6f Mb/J\n",
              bnoma::energy_efficiency(report, sol, cfg));
  std::printf("icsi interference: %.6e W\n", bnoma::icsi_interference(ch, sol));
  std::printf("slacks (hop 1)   : rate=[%.3e %.3e] budget=%.3e coeff=%.3e\n",
              out.slacks.rate_rsu1, out.slacks.rate_rsu2, out.slacks.bs_budget_w,
              out.slacks.bs_coeff);
  for (int m = 0; m < 2; ++m) {
    std::printf("slacks (RSU %d)   : rate=[%.3e %.3e] budget=%.3e coeff=%.3e xi=[%.3e %.3e]\n",
                m + 1, out.slacks.rate_veh1[m], out.slacks.rate_veh2[m],
                out.slacks.rsu_budget_w[m], out.slacks.rsu_coeff[m],
                out.slacks.xi_low[m], out.slacks.xi_high[m]);
  }
}

int cmd_solve(const CliOptions& opt, std::uint64_t seed_override, bool has_seed,
              const std::string& mode_name) {
  bnoma::NetworkConfig cfg = resolve_config(opt, nullptr);
  const bnoma::Mode mode = bnoma::mode_from_name(mode_name);
  const std::uint64_t seed = has_seed ? seed_override : cfg.seed;
  bnoma::Rng rng(seed);
  const bnoma::ChannelRealization ch = bnoma::generate_realization(cfg, rng);
  const bnoma::SolveOutcome outcome = bnoma::solve_algorithm1(
      ch, cfg, bnoma::SolverSettings::from_config(cfg), mode);
  std::printf("mode             : %s\nseed             : %llu\n",
              bnoma::mode_name(mode), static_cast<unsigned long long>(seed));
  print_solution(outcome, cfg, ch);
  return outcome.status == bnoma::SolveStatus::infeasible ? kExitInfeasible : kExitOk;
}

int cmd_sweep(const CliOptions& opt, std::string param, std::vector<double> values,
              int realizations, const std::string& modes, bool gnuplot) {
  std::optional<bnoma::PlanSpec> manifest_plan;
  bnoma::NetworkConfig cfg = resolve_config(opt, &manifest_plan);

  bnoma::SweepPlan plan;
  plan.base = cfg;
  if (manifest_plan) {
    plan.param = bnoma::sweep_param_from_name(manifest_plan->param);
    if (!manifest_plan->values.empty()) plan.values = manifest_plan->values;
    if (manifest_plan->realizations > 0) plan.realizations = manifest_plan->realizations;
    plan.run_ambc = manifest_plan->run_ambc;
    plan.run_pure_noma = manifest_plan->run_pure_noma;
  } else {
    plan.realizations = cfg.n_realizations;
  }
  if (!param.empty()) plan.param = bnoma::sweep_param_from_name(param);
  if (!values.empty()) plan.values = values;
  if (realizations > 0) plan.realizations = realizations;
  if (modes == "ambc") {
    plan.run_ambc = true;
    plan.run_pure_noma = false;
  } else if (modes == "pure_noma") {
    plan.run_ambc = false;
    plan.run_pure_noma = true;
  } else if (modes == "both") {
    plan.run_ambc = true;
    plan.run_pure_noma = true;
  } else if (!modes.empty()) {
    throw bnoma::ConfigError("modes", "expected ambc, pure_noma, or both");
  }
  plan.validate();

  const bnoma::SweepResult result = bnoma::run_sweep(plan, opt.threads);

  namespace fs = std::filesystem;
  const fs::path dir(resolve_out_dir(opt));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw bnoma::IoError("cannot create output directory: " + dir.string());
  const std::string csv_path = (dir / "sweep.csv").string();
  const std::string manifest_path = (dir / "manifest.json").string();
  std::vector<std::string> outputs{"sweep.csv"};
  bnoma::write_text_file(csv_path, bnoma::sweep_csv(result));
  if (gnuplot) {
    bnoma::write_text_file((dir / "plot.gp").string(), bnoma::gnuplot_script(result));
    outputs.push_back("plot.gp");
  }
  bnoma::write_text_file(manifest_path,
                         bnoma::manifest_json(result, outputs).dump(2) + "\n");

  std::printf("%s\n", bnoma::kSweepCsvHeader);
  std::string csv = bnoma::sweep_csv(result);
  std::fputs(csv.c_str() + csv.find('\n') + 1, stdout);
  std::printf("wrote %s and %s\n", csv_path.c_str(), manifest_path.c_str());

  bool any_feasible = false;
  for (const auto& p : result.points) any_feasible |= p.n_feasible > 0;
  return any_feasible ? kExitOk : kExitInfeasible;
}

int cmd_verify(const CliOptions& opt, int seeds, double res_p1, double res_p2) {
  bnoma::NetworkConfig cfg = resolve_config(opt, nullptr);
  const bnoma::SolverSettings settings = bnoma::SolverSettings::from_config(cfg);
  int failures = 0;

  std::printf("P1: solver vs grid search (resolution %g)\n", res_p1);
  for (int k = 1; k <= seeds; ++k) {
    bnoma::Rng rng(bnoma::mix_seed(cfg.seed, k));
    const bnoma::ChannelRealization ch = bnoma::generate_realization(cfg, rng);
    const bnoma::SolveOutcome out = bnoma::solve_p1(ch, cfg, settings);
    const bnoma::GridResultP1 oracle =
        bnoma::grid_search_p1(ch, cfg, bnoma::GridSpec{res_p1});
    const bool solver_ok = out.status == bnoma::SolveStatus::converged;
    if (solver_ok != oracle.feasible) {
      std::printf("  seed %2d: FAIL status mismatch (solver %d oracle %d)\n", k,
                  solver_ok, oracle.feasible);
      ++failures;
      continue;
    }
    if (!solver_ok) {
      std::printf("  seed %2d: ok (both infeasible)\n", k);
      continue;
    }
    const double sp = out.solution.p_bs_w * out.solution.alpha_sum();
    const double allowance =
        std::max(0.02 * oracle.power_w, 2.0 * res_p1 * cfg.p_max_w());
    const bool ok = std::abs(sp - oracle.power_w) <= allowance * (1.0 + 1e-9);
    std::printf("  seed %2d: %s solver %.6e W oracle %.6e W\n", k,
                ok ? "ok  " : "FAIL", sp, oracle.power_w);
    failures += !ok;
  }

  std::printf("P2: solver vs grid search (resolution %g)\n", res_p2);
  for (int k = 1; k <= seeds; ++k) {
    bnoma::Rng rng(bnoma::mix_seed(cfg.seed, k));
    const bnoma::ChannelRealization ch = bnoma::generate_realization(cfg, rng);
    const bnoma::SolveOutcome out =
        bnoma::solve_algorithm1(ch, cfg, settings, bnoma::Mode::ambc);
    if (out.status != bnoma::SolveStatus::converged) {
      std::printf("  seed %2d: skipped (pipeline %s)\n", k,
                  out.status == bnoma::SolveStatus::infeasible ? "infeasible"
                                                               : "not converged");
      continue;
    }
    std::array<std::array<double, 2>, 2> frozen{};
    for (int m = 0; m < 2; ++m) {
      for (int i = 0; i < 2; ++i) {
        frozen[m][i] = bnoma::cross_interference_w(ch, out.solution, m, i);
      }
    }
    const auto oracle = bnoma::grid_search_p2(ch, cfg, bnoma::GridSpec{res_p2},
                                              out.solution.q_rsu_w, frozen);
    for (int m = 0; m < 2; ++m) {
      if (!oracle[m].feasible) {
        std::printf("  seed %2d RSU %d: FAIL oracle infeasible where solver converged\n",
                    k, m + 1);
        ++failures;
        continue;
      }
      const double sp = out.solution.q_rsu_w[m] * out.solution.beta_sum(m);
      const double allowance =
          std::max(0.03 * oracle[m].power_w, 2.0 * res_p2 * out.solution.q_rsu_w[m]);
      const bool ok = std::abs(sp - oracle[m].power_w) <= allowance * (1.0 + 1e-9);
      std::printf("  seed %2d RSU %d: %s solver %.6e W oracle %.6e W\n", k, m + 1,
                  ok ? "ok  " : "FAIL", sp, oracle[m].power_w);
      failures += !ok;
    }
  }

  std::printf(failures == 0 ? "verify: PASS\n" : "verify: FAIL (%d)\n", failures);
  return failures == 0 ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"backscatter-assisted NOMA V2X power allocation simulator"};
  app.require_subcommand(0, 1);

  CliOptions opt;

  auto* solve = app.add_subcommand("solve", "solve one channel realization");
  std::uint64_t seed = 0;
  std::string mode = "ambc";
  auto* seed_opt = solve->add_option("--seed", seed, "channel seed");
  solve->add_option("--mode", mode, "ambc or pure_noma")
      ->check(CLI::IsMember({"ambc", "pure_noma"}));
  add_config_flags(solve, opt);

  auto* sweep = app.add_subcommand("sweep", "run a Monte Carlo parameter sweep");
  std::string param;
  std::vector<double> values;
  int realizations = 0;
  std::string modes;
  sweep->add_option("--param", param,
                    "sigma_eps, p_max, rsu_radius, or circuit_power");
  sweep->add_option("--values", values, "sweep values")->delimiter(',');
  sweep->add_option("--realizations", realizations, "realizations per sweep point")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--modes", modes, "both, ambc, or pure_noma");
  sweep->add_option_function<std::string>(
      "--seed", [&opt](const std::string& v) { opt.overrides.emplace_back("seed", v); },
      "master seed");
  bool gnuplot = false;
  sweep->add_flag("--gnuplot", gnuplot, "also write a gnuplot script");
  add_config_flags(sweep, opt);

  auto* verify = app.add_subcommand("verify", "run the solver-vs-oracle suite");
  int verify_seeds = 20;
  double res_p1 = 1e-3;
  double res_p2 = 2e-2;
  verify->add_option("--seeds", verify_seeds, "number of seeded realizations")
      ->check(CLI::PositiveNumber);
  verify->add_option("--p1-resolution", res_p1, "P1 grid resolution");
  verify->add_option("--p2-resolution", res_p2, "P2 grid resolution");
  verify->add_option_function<std::string>(
      "--seed", [&opt](const std::string& v) { opt.overrides.emplace_back("seed", v); },
      "master seed");
  add_config_flags(verify, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (app.get_subcommands().empty()) {
    std::fputs(app.help().c_str(), stderr);
    return kExitUsage;
  }

  try {
    if (solve->parsed()) return cmd_solve(opt, seed, seed_opt->count() > 0, mode);
    if (sweep->parsed())
      return cmd_sweep(opt, param, values, realizations, modes, gnuplot);
    if (verify->parsed()) return cmd_verify(opt, verify_seeds, res_p1, res_p2);
  } catch (const bnoma::UnknownKeyError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const bnoma::ConfigError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitValidation;
  } catch (const bnoma::IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return kExitUsage;
}

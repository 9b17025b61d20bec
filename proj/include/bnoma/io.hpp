#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bnoma/config.hpp"
#include "bnoma/simulation.hpp"

namespace bnoma {

inline constexpr const char* kSweepCsvHeader =
    "param,value,mode,mean_ee_mbpj,stderr_ee,mean_icsi_w,feasibility_rate,"
    "mean_iters,n";
inline constexpr const char* kFormatVersion = "bnoma.sweep.v1";

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& message) : std::runtime_error(message) {}
};

class UnknownKeyError : public std::runtime_error {
 public:
  explicit UnknownKeyError(const std::string& key)
      : std::runtime_error("unknown configuration key: " + key), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Shortest representation that round-trips; locale independent.
inline std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline std::string sweep_csv(const SweepResult& result) {
  std::string out = kSweepCsvHeader;
  out.push_back('\n');
  const char* param = sweep_param_name(result.plan.param);
  for (const auto& p : result.points) {
    out += param;
    out.push_back(',');
    out += format_double(p.value);
    out.push_back(',');
    out += mode_name(p.mode);
    out.push_back(',');
    out += format_double(p.mean_ee);
    out.push_back(',');
    out += format_double(p.stderr_ee);
    out.push_back(',');
    out += format_double(p.mean_icsi_w);
    out.push_back(',');
    out += format_double(p.feasibility_rate);
    out.push_back(',');
    out += format_double(p.mean_iterations);
    out.push_back(',');
    out += std::to_string(p.n);
    out.push_back('\n');
  }
  return out;
}

// q_max is echoed as null while it derives from p_max; an explicit value
// would re-enter through a dBm round-trip that is not bit-exact.
inline nlohmann::json config_json(const NetworkConfig& cfg) {
  return nlohmann::json{{"p_max", cfg.p_max},
                        {"q_max", cfg.q_max ? nlohmann::json(*cfg.q_max)
                                            : nlohmann::json(nullptr)},
                        {"sigma_eps", cfg.sigma_eps},
                        {"c_min", cfg.c_min},
                        {"pathloss_exp", cfg.pathloss_exp},
                        {"noise_density_dbm", cfg.noise_density_dbm},
                        {"bandwidth_hz", cfg.bandwidth_hz},
                        {"circuit_power_dbm", cfg.circuit_power_dbm},
                        {"bs_radius_m", cfg.bs_radius_m},
                        {"rsu_radius_m", cfg.rsu_radius_m},
                        {"ref_distance_m", cfg.ref_distance_m},
                        {"n_realizations", cfg.n_realizations},
                        {"seed", cfg.seed},
                        {"step_size_initial", cfg.step_size_initial},
                        {"max_iterations", cfg.max_iterations},
                        {"convergence_tol", cfg.convergence_tol}};
}

// Companion gnuplot script for a sweep.csv written next to it.
inline std::string gnuplot_script(const SweepResult& result) {
  std::string s;
  s += "set datafile separator \",\"\n";
  s += std::string("set xlabel \"") + sweep_param_name(result.plan.param) + "\"\n";
  s += "set ylabel \"mean energy efficiency [Mb/J]\"\n";
  s += "set key left\n";
  std::vector<std::string> curves;
  if (result.plan.run_ambc)
    curves.push_back(
        "\"< grep ',ambc,' sweep.csv\" using 2:4:5 with yerrorlines title \"AmBC\"");
  if (result.plan.run_pure_noma)
    curves.push_back(
        "\"< grep ',pure_noma,' sweep.csv\" using 2:4:5 with yerrorlines title "
        "\"pure NOMA\"");
  s += "plot " + curves[0];
  for (std::size_t k = 1; k < curves.size(); ++k) s += ", \\\n     " + curves[k];
  s += "\n";
  return s;
}

inline std::string iso_timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// Run manifest: complete configuration echo plus the sweep plan, format tag,
// master seed, and emitted files. Feeding it back through --config
// reproduces the run.
inline nlohmann::json manifest_json(const SweepResult& result,
                                    const std::vector<std::string>& outputs) {
  nlohmann::json plan{{"param", sweep_param_name(result.plan.param)},
                      {"values", result.plan.values},
                      {"realizations", result.plan.realizations},
                      {"run_ambc", result.plan.run_ambc},
                      {"run_pure_noma", result.plan.run_pure_noma}};
  return nlohmann::json{{"format_version", kFormatVersion},
                        {"timestamp", iso_timestamp()},
                        {"master_seed", result.plan.base.seed},
                        {"config", config_json(result.plan.base)},
                        {"plan", plan},
                        {"outputs", outputs}};
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

// Optional plan section recovered from a manifest-style config file.
struct PlanSpec {
  std::string param;
  std::vector<double> values;
  int realizations = 0;
  bool run_ambc = true;
  bool run_pure_noma = true;
};

struct LoadedConfig {
  NetworkConfig config;
  std::optional<PlanSpec> plan;
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    while (pos < value.size() && std::isspace(static_cast<unsigned char>(value[pos])))
      ++pos;
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "cannot parse number from '" + value + "'");
  }
}

inline void apply_config_value(NetworkConfig& cfg, const std::string& key,
                               const std::string& value) {
  if (key == "p_max") cfg.p_max = parse_double(key, value);
  else if (key == "q_max") cfg.q_max = parse_double(key, value);
  else if (key == "sigma_eps") cfg.sigma_eps = parse_double(key, value);
  else if (key == "c_min") cfg.c_min = parse_double(key, value);
  else if (key == "pathloss_exp") cfg.pathloss_exp = parse_double(key, value);
  else if (key == "noise_density_dbm") cfg.noise_density_dbm = parse_double(key, value);
  else if (key == "bandwidth_hz") cfg.bandwidth_hz = parse_double(key, value);
  else if (key == "circuit_power_dbm") cfg.circuit_power_dbm = parse_double(key, value);
  else if (key == "bs_radius_m") cfg.bs_radius_m = parse_double(key, value);
  else if (key == "rsu_radius_m") cfg.rsu_radius_m = parse_double(key, value);
  else if (key == "ref_distance_m") cfg.ref_distance_m = parse_double(key, value);
  else if (key == "n_realizations")
    cfg.n_realizations = static_cast<int>(parse_double(key, value));
  else if (key == "seed")
    cfg.seed = static_cast<std::uint64_t>(parse_double(key, value));
  else if (key == "step_size_initial")
    cfg.step_size_initial = parse_double(key, value);
  else if (key == "max_iterations")
    cfg.max_iterations = static_cast<int>(parse_double(key, value));
  else if (key == "convergence_tol") cfg.convergence_tol = parse_double(key, value);
  else throw UnknownKeyError(key);
}

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline LoadedConfig load_config_json(const std::string& text, NetworkConfig base) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("config JSON parse error: ") + e.what());
  }
  const nlohmann::json& cfg_obj = doc.contains("config") ? doc.at("config") : doc;
  LoadedConfig out;
  out.config = base;
  for (const auto& [key, value] : cfg_obj.items()) {
    if (value.is_null()) continue;  // derived field
    apply_config_value(out.config, key,
                       value.is_string() ? value.get<std::string>() : value.dump());
  }
  if (doc.contains("plan")) {
    const auto& p = doc.at("plan");
    PlanSpec plan;
    plan.param = p.value("param", std::string{"sigma_eps"});
    plan.values = p.value("values", std::vector<double>{});
    plan.realizations = p.value("realizations", 0);
    plan.run_ambc = p.value("run_ambc", true);
    plan.run_pure_noma = p.value("run_pure_noma", true);
    out.plan = plan;
  }
  return out;
}

}  // namespace detail

// Loads `key = value` lines (# starts a comment) or a manifest-style JSON
// document onto a base configuration.
inline LoadedConfig load_config_text(const std::string& text, NetworkConfig base) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == '{') return detail::load_config_json(text, base);
    break;
  }
  LoadedConfig out;
  out.config = base;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string entry = detail::trim(line);
    if (entry.empty()) continue;
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos)
      throw IoError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = detail::trim(entry.substr(0, eq));
    const std::string value = detail::trim(entry.substr(eq + 1));
    detail::apply_config_value(out.config, key, value);
  }
  return out;
}

inline LoadedConfig load_config_file(const std::string& path, NetworkConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_config_text(buf.str(), base);
}

}  // namespace bnoma

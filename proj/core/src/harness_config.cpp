// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "gpanm/errors.hpp"
#include "gpanm/harness.hpp"

namespace gpanm {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  require(used == v.size() && !v.empty() && std::isfinite(d), ErrorCode::ConfigError,
          "key '" + key + "': '" + v + "' is not a number");
  return d;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  require(ec == std::errc() && ptr == v.data() + v.size(), ErrorCode::ConfigError,
          "key '" + key + "': '" + v + "' is not an integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string u = upper(v);
  if (u == "TRUE" || u == "1" || u == "YES") return true;
  if (u == "FALSE" || u == "0" || u == "NO") return false;
  fail(ErrorCode::ConfigError, "key '" + key + "': '" + v + "' is not a boolean");
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::GPANM: return "GPANM";
    case Method::GPANM_L1: return "GPANM_L1";
    case Method::ANM: return "ANM";
    case Method::MUSIC: return "MUSIC";
    case Method::SOMP: return "SOMP";
  }
  return "UNKNOWN";
}

Method parse_method(std::string_view name) {
  const std::string u = upper(trim(name));
  for (Method m : {Method::GPANM, Method::GPANM_L1, Method::ANM, Method::MUSIC, Method::SOMP}) {
    if (u == to_string(m)) return m;
  }
  if (u == "GP_ANM") return Method::GPANM;
  if (u == "GP_ANM_L1") return Method::GPANM_L1;
  fail(ErrorCode::ConfigError, "unknown method '" + std::string(name) + "'");
}

std::vector<Method> parse_method_list(std::string_view csv) {
  std::vector<Method> out;
  std::string item;
  std::istringstream ss{std::string(csv)};
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    const Method m = parse_method(item);
    require(std::find(out.begin(), out.end(), m) == out.end(), ErrorCode::ConfigError,
            "method '" + trim(item) + "' listed twice");
    out.push_back(m);
  }
  require(!out.empty(), ErrorCode::ConfigError, "method list is empty");
  return out;
}

std::string_view to_string(SweepAxis a) noexcept {
  switch (a) {
    case SweepAxis::SNR: return "SNR";
    case SweepAxis::SIGMA_A: return "SIGMA_A";
    case SweepAxis::SIGMA_P: return "SIGMA_P";
    case SweepAxis::P: return "P";
    case SweepAxis::N: return "N";
    case SweepAxis::K: return "K";
    case SweepAxis::SEPARATION: return "SEPARATION";
  }
  return "UNKNOWN";
}

SweepAxis parse_axis(std::string_view name) {
  const std::string u = upper(trim(name));
  for (SweepAxis a : {SweepAxis::SNR, SweepAxis::SIGMA_A, SweepAxis::SIGMA_P, SweepAxis::P, SweepAxis::N,
                      SweepAxis::K, SweepAxis::SEPARATION}) {
    if (u == to_string(a)) return a;
  }
  fail(ErrorCode::ConfigError, "unknown sweep axis '" + std::string(name) + "'");
}

double ScenarioConfig::range_half_width() const {
  return 0.5 * (theta_hi_deg - theta_lo_deg);
}

void ScenarioConfig::validate() const {
  auto check = [](bool ok, const std::string& msg) { require(ok, ErrorCode::ConfigError, msg); };
  check(n_antennas >= 2, "n_antennas must be at least 2");
  check(spacing_ratio > 0.0, "spacing_ratio must be positive");
  check(k_signals >= 1 && k_signals < n_antennas, "k_signals must lie in [1, n_antennas)");
  check(k_signals <= 6, "k_signals above 6 is not supported by exhaustive matching");
  check(p_snapshots >= 1, "p_snapshots must be at least 1");
  check(sigma_a >= 0.0 && sigma_p_deg >= 0.0, "error spreads must be non-negative");
  check(theta_lo_deg >= -90.0 && theta_hi_deg <= 90.0 && theta_lo_deg < theta_hi_deg,
        "theta range must be an increasing interval inside [-90, 90]");
  check(min_separation_deg >= 0.0, "min_separation_deg must be non-negative");
  check(min_separation_deg * (k_signals - 1) <= theta_hi_deg - theta_lo_deg,
        "min_separation_deg * (k_signals - 1) does not fit in the range");
  check(n_trials >= 1, "n_trials must be at least 1");
  check(!methods.empty(), "at least one method is required");
  check(params.eta >= 1.0, "eta must be at least 1");
  check(params.t_param >= 0.0, "t_param must be non-negative");
  check(params.estimator_grid_step_deg > 0.0 && params.baseline_grid_step_deg > 0.0, "grid steps must be positive");
  check(params.refine_iters >= 1, "refine_iters must be at least 1");
  check(params.solver.abs_tol > 0.0 && params.solver.rel_tol > 0.0 && params.solver.max_iters >= 1,
        "solver tolerances must be positive and max_iters at least 1");
  check(!params.l1_ce_scale || *params.l1_ce_scale > 0.0, "l1_ce_scale must be positive");
}

void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  const std::string& v = value;
  auto& mp = cfg.params;
  if (key == "n_antennas") cfg.n_antennas = to_int<int>(key, v);
  else if (key == "spacing_ratio") cfg.spacing_ratio = to_double(key, v);
  else if (key == "k_signals") cfg.k_signals = to_int<int>(key, v);
  else if (key == "p_snapshots") cfg.p_snapshots = to_int<int>(key, v);
  else if (key == "snr_db") cfg.snr_db = to_double(key, v);
  else if (key == "sigma_a") cfg.sigma_a = to_double(key, v);
  else if (key == "sigma_p_deg") cfg.sigma_p_deg = to_double(key, v);
  else if (key == "theta_lo_deg") cfg.theta_lo_deg = to_double(key, v);
  else if (key == "theta_hi_deg") cfg.theta_hi_deg = to_double(key, v);
  else if (key == "min_separation_deg") cfg.min_separation_deg = to_double(key, v);
  else if (key == "n_trials") cfg.n_trials = to_int<int>(key, v);
  else if (key == "master_seed") cfg.master_seed = to_int<std::uint64_t>(key, v);
  else if (key == "methods") cfg.methods = parse_method_list(v);
  else if (key == "eta") mp.eta = to_double(key, v);
  else if (key == "t_param") mp.t_param = to_double(key, v);
  else if (key == "estimator_grid_step_deg") mp.estimator_grid_step_deg = to_double(key, v);
  else if (key == "baseline_grid_step_deg") mp.baseline_grid_step_deg = to_double(key, v);
  else if (key == "refine_iters") mp.refine_iters = to_int<int>(key, v);
  else if (key == "refine_tol") mp.refine_tol = to_double(key, v);
  else if (key == "l1_ce_scale") mp.l1_ce_scale = to_double(key, v);
  else if (key == "solver_abs_tol") mp.solver.abs_tol = to_double(key, v);
  else if (key == "solver_rel_tol") mp.solver.rel_tol = to_double(key, v);
  else if (key == "solver_max_iters") mp.solver.max_iters = to_int<int>(key, v);
  else if (key == "solver_verbose") mp.solver.verbose = to_bool(key, v);
  else fail(ErrorCode::ConfigError, "unknown key '" + key + "'");
}

ScenarioConfig parse_config(std::istream& is) {
  ScenarioConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    require(eq != std::string::npos, ErrorCode::ConfigError,
            "line " + std::to_string(lineno) + ": expected key=value");
    set_config_value(cfg, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream is(path);
  require(static_cast<bool>(is), ErrorCode::IoError, "cannot open " + path);
  return parse_config(is);
}

void write_config(std::ostream& os, const ScenarioConfig& cfg) {
  const auto& mp = cfg.params;
  os << std::setprecision(17);
  os << "n_antennas=" << cfg.n_antennas << '\n'
     << "spacing_ratio=" << cfg.spacing_ratio << '\n'
     << "k_signals=" << cfg.k_signals << '\n'
     << "p_snapshots=" << cfg.p_snapshots << '\n'
     << "snr_db=" << cfg.snr_db << '\n'
     << "sigma_a=" << cfg.sigma_a << '\n'
     << "sigma_p_deg=" << cfg.sigma_p_deg << '\n'
     << "theta_lo_deg=" << cfg.theta_lo_deg << '\n'
     << "theta_hi_deg=" << cfg.theta_hi_deg << '\n'
     << "min_separation_deg=" << cfg.min_separation_deg << '\n'
     << "n_trials=" << cfg.n_trials << '\n'
     << "master_seed=" << cfg.master_seed << '\n'
     << "methods=";
  for (std::size_t i = 0; i < cfg.methods.size(); ++i) os << (i ? "," : "") << to_string(cfg.methods[i]);
  os << '\n'
     << "eta=" << mp.eta << '\n'
     << "t_param=" << mp.t_param << '\n'
     << "estimator_grid_step_deg=" << mp.estimator_grid_step_deg << '\n'
     << "baseline_grid_step_deg=" << mp.baseline_grid_step_deg << '\n'
     << "refine_iters=" << mp.refine_iters << '\n'
     << "refine_tol=" << mp.refine_tol << '\n';
  if (mp.l1_ce_scale) os << "l1_ce_scale=" << *mp.l1_ce_scale << '\n';
  os << "solver_abs_tol=" << mp.solver.abs_tol << '\n'
     << "solver_rel_tol=" << mp.solver.rel_tol << '\n'
     << "solver_max_iters=" << mp.solver.max_iters << '\n'
     << "solver_verbose=" << (mp.solver.verbose ? "true" : "false") << '\n';
}

}  // namespace gpanm

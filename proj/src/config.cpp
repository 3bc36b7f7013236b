#include "rps/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rps {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw DomainError("config: key '" + key + "' has non-numeric value '" + value + "'");
  }
  if (pos != value.size()) {
    throw DomainError("config: key '" + key + "' has trailing junk in '" + value + "'");
  }
  return out;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  const double d = parse_double(key, value);
  const double r = std::round(d);
  if (std::abs(d - r) > 0.0) {
    throw DomainError("config: key '" + key + "' must be an integer");
  }
  return std::int64_t(r);
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw DomainError("config: key '" + key + "' is an empty list");
  return out;
}

const std::set<std::string> kCommonKeys = {
    "problem", "a", "c", "forcing_amplitude", "forcing_harmonic", "a0", "q",
    "tau", "scheme", "dt", "dt_fine", "r", "xi", "base_seed", "n_seeds"};

std::set<std::string> command_keys(const std::string& command) {
  std::set<std::string> keys = kCommonKeys;
  if (command == "simulate") {
    keys.insert({"k_max", "tol"});
  } else if (command == "converge") {
    keys.insert({"dt_list", "pullback_depth", "truth", "dt_ref"});
  } else if (command == "diagnose") {
    keys.insert({"pullback_k", "t_max", "t_step", "pair_from", "pair_to", "tol"});
  } else if (command == "measure") {
    keys.insert({"dt_list", "pullback_depth", "n_samples", "bootstrap"});
  } else if (command == "floquet") {
    keys.insert({"floquet_h"});
  } else {
    throw DomainError("unknown command '" + command + "'");
  }
  return keys;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("config: cannot open '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "config: line " << lineno << " is not 'key = value'";
      throw DomainError(msg.str());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw DomainError("config: empty key");
    if (out.count(key)) throw DomainError("config: duplicate key '" + key + "'");
    out[key] = value;
  }
  return out;
}

RunConfig parse_run_config(const std::string& path, const std::string& command) {
  const auto kv = parse_key_values(path);
  const auto allowed = command_keys(command);
  for (const auto& [key, value] : kv) {
    (void)value;
    if (!allowed.count(key)) {
      throw DomainError("config: unknown key '" + key + "' for command '" +
                        command + "'");
    }
  }

  RunConfig cfg;
  auto get = [&kv](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto* v = get("problem")) cfg.problem = *v;
  if (auto* v = get("a")) cfg.a = parse_double("a", *v);
  if (auto* v = get("c")) cfg.c = parse_double("c", *v);
  if (auto* v = get("forcing_amplitude"))
    cfg.forcing_amplitude = parse_double("forcing_amplitude", *v);
  if (auto* v = get("forcing_harmonic"))
    cfg.forcing_harmonic = int(parse_int("forcing_harmonic", *v));
  if (auto* v = get("a0")) cfg.a0 = parse_double("a0", *v);
  if (auto* v = get("q")) cfg.q = parse_double("q", *v);
  if (auto* v = get("tau")) cfg.tau = parse_double("tau", *v);
  if (auto* v = get("scheme")) cfg.scheme = *v;
  if (auto* v = get("dt")) cfg.dt = parse_double("dt", *v);
  if (auto* v = get("dt_fine")) cfg.dt_fine = parse_double("dt_fine", *v);
  if (auto* v = get("r")) cfg.r = parse_double("r", *v);
  if (auto* v = get("xi")) cfg.xi = parse_double("xi", *v);
  if (auto* v = get("base_seed"))
    cfg.base_seed = std::uint64_t(parse_int("base_seed", *v));
  if (auto* v = get("n_seeds")) cfg.n_seeds = int(parse_int("n_seeds", *v));
  if (auto* v = get("k_max")) cfg.k_max = int(parse_int("k_max", *v));
  if (auto* v = get("tol")) cfg.tol = parse_double("tol", *v);
  if (auto* v = get("dt_list")) cfg.dt_list = parse_list("dt_list", *v);
  if (auto* v = get("pullback_depth"))
    cfg.pullback_depth = int(parse_int("pullback_depth", *v));
  if (auto* v = get("truth")) cfg.truth = *v;
  if (auto* v = get("dt_ref")) cfg.dt_ref = parse_double("dt_ref", *v);
  if (auto* v = get("n_samples")) cfg.n_samples = int(parse_int("n_samples", *v));
  if (auto* v = get("bootstrap")) cfg.bootstrap = int(parse_int("bootstrap", *v));
  if (auto* v = get("pullback_k")) cfg.pullback_k = int(parse_int("pullback_k", *v));
  if (auto* v = get("t_max")) cfg.t_max = parse_double("t_max", *v);
  if (auto* v = get("t_step")) cfg.t_step = parse_double("t_step", *v);
  if (auto* v = get("pair_from")) cfg.pair_from = parse_double("pair_from", *v);
  if (auto* v = get("pair_to")) cfg.pair_to = parse_double("pair_to", *v);
  if (auto* v = get("floquet_h")) cfg.floquet_h = parse_double("floquet_h", *v);

  if (cfg.n_seeds < 1) throw DomainError("config: n_seeds must be >= 1");
  if (cfg.tau <= 0.0) throw DomainError("config: tau must be positive");
  return cfg;
}

BuiltProblem build_problem(const RunConfig& cfg) {
  BuiltProblem out;
  if (cfg.problem == "example1") {
    out.sde = make_example1();
    out.oracle = oracle_example1();
    out.has_oracle = true;
  } else if (cfg.problem == "linear") {
    out.sde = make_linear_scalar(cfg.a, cfg.c, cfg.forcing_amplitude,
                                 cfg.forcing_harmonic, cfg.tau);
    out.oracle = oracle_for_linear(cfg.a, cfg.c, cfg.forcing_amplitude,
                                   cfg.forcing_harmonic, cfg.tau);
    out.has_oracle = true;
  } else if (cfg.problem == "mathieu") {
    out.sde = make_mathieu(cfg.a0, cfg.q, cfg.c, cfg.forcing_amplitude, cfg.tau);
  } else if (cfg.problem == "rotation") {
    out.sde = make_rotation(cfg.tau);
  } else {
    throw DomainError("config: unknown problem '" + cfg.problem + "'");
  }
  return out;
}

SchemeKind parse_scheme_kind(const std::string& name) {
  if (name == "euler-maruyama") return SchemeKind::EulerMaruyama;
  if (name == "modified-milstein") return SchemeKind::ModifiedMilstein;
  throw DomainError("config: unknown scheme '" + name + "'");
}

}  // namespace rps

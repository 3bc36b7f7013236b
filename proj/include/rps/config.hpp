#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rps/model.hpp"
#include "rps/oracle.hpp"
#include "rps/schemes.hpp"

namespace rps {

// Flat key = value file: one pair per line, '#' comments, no sections.
// Unknown and duplicate keys are hard errors so a typo cannot silently
// fall back to a default.
std::map<std::string, std::string> parse_key_values(const std::string& path);

struct RunConfig {
  // problem selection
  std::string problem = "example1";  // example1 | linear | mathieu | rotation
  double a = -1.0;                   // linear: drift eigenvalue
  double c = 1.0;                    // multiplicative-noise coefficient
  double forcing_amplitude = 1.0;
  int forcing_harmonic = 1;
  double a0 = -1.0;  // mathieu: mean of a(t)
  double q = 1.0;    // mathieu: cosine amplitude
  double tau = 2.0;

  // scheme / run
  std::string scheme = "euler-maruyama";
  double dt = 0.01;
  double dt_fine = 0.0;  // 0 = defaulted per command
  double r = 0.0;
  double xi = 0.5;
  std::uint64_t base_seed = 1;
  int n_seeds = 1000;

  // simulate
  int k_max = 3;
  double tol = 1e-3;

  // converge / measure
  std::vector<double> dt_list;
  int pullback_depth = 3;
  std::string truth = "oracle";  // oracle | reference
  double dt_ref = 0.0;
  int n_samples = 5000;
  int bootstrap = 500;

  // diagnose
  int pullback_k = 3;
  double t_max = 6.0;
  double t_step = 0.05;
  double pair_from = -5.0;
  double pair_to = 2.0;

  // floquet
  double floquet_h = 0.0;  // 0 = tau/1000
};

// Parses and validates the config for one of the commands: simulate,
// converge, diagnose, measure, floquet. Every key must belong to the
// command (or the common set).
RunConfig parse_run_config(const std::string& path, const std::string& command);

struct BuiltProblem {
  SdeProblem sde;
  bool has_oracle = false;
  LinearScalarProblem oracle;
};

// Instantiates the configured problem; the oracle side is populated for
// the scalar linear family.
BuiltProblem build_problem(const RunConfig& cfg);

SchemeKind parse_scheme_kind(const std::string& name);

}  // namespace rps

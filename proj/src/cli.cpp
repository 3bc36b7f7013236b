#include "rps/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "rps/analysis.hpp"
#include "rps/config.hpp"
#include "rps/floquet.hpp"
#include "rps/io.hpp"
#include "rps/pullback.hpp"

namespace rps {

namespace {

std::vector<std::uint64_t> seed_list(const RunConfig& cfg, std::uint64_t offset) {
  std::vector<std::uint64_t> seeds(size_t(cfg.n_seeds));
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    seeds[i] = cfg.base_seed + offset + i;
  }
  return seeds;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write '" + path.string() + "'");
  out << text;
}

template <typename Fn>
void write_csv(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write '" + path.string() + "'");
  fn(out);
}

void require_constant_linear_part(const SdeProblem& sde) {
  if (sde.has_time_varying_A()) {
    throw ConditionError("A",
        "this command handles constant linear parts; run the floquet "
        "command to reduce a periodic A(t) first");
  }
}

int cmd_simulate(const RunConfig& cfg, const CliOptions& opts) {
  BuiltProblem built = build_problem(cfg);
  require_constant_linear_part(built.sde);
  const ConditionReport report = require_valid(built.sde);
  const double dt_fine = cfg.dt_fine > 0.0 ? cfg.dt_fine : cfg.dt;
  const SchemeConfig scheme = make_scheme_config(
      parse_scheme_kind(cfg.scheme), cfg.dt, built.sde, report, dt_fine);

  const double t_min = -double(cfg.k_max) * built.sde.tau;
  const auto seeds = seed_list(cfg, opts.seed_offset);
  auto factory = [&](std::uint64_t seed) {
    return WienerPath::build(seed, built.sde.noise_dim, dt_fine, 0.0, t_min,
                             std::max(cfg.r, 0.0));
  };
  const InitialCondition xi =
      InitialCondition::deterministic(Eigen::VectorXd::Constant(built.sde.state_dim, cfg.xi));

  const PullbackResult result = pullback_rps(
      built.sde, scheme, factory, seeds, cfg.r, cfg.k_max, cfg.tol, xi, opts.threads);

  const Trajectory traj =
      integrate(built.sde, scheme, factory(seeds.front()),
                -double(result.k_used) * built.sde.tau, cfg.r, xi.sample(seeds.front()));

  const std::filesystem::path out(opts.out_dir);
  write_csv(out / "trajectory.csv", [&](std::ostream& os) {
    write_trajectory_csv(traj, os);
  });
  write_file(out / "pullback.json", pullback_result_to_json(result));
  std::cerr << "simulate: k_used=" << result.k_used
            << " converged=" << (result.converged ? "yes" : "no") << "\n";
  return kExitOk;
}

int cmd_converge(const RunConfig& cfg, const CliOptions& opts) {
  BuiltProblem built = build_problem(cfg);
  require_constant_linear_part(built.sde);
  if (cfg.dt_list.size() < 3) {
    throw DomainError("converge: need at least 3 step sizes for an order fit");
  }
  const double dt_min = *std::min_element(cfg.dt_list.begin(), cfg.dt_list.end());

  StrongStudyConfig study;
  study.dt_list = cfg.dt_list;
  study.n_seeds = cfg.n_seeds;
  study.r = cfg.r;
  study.pullback_depth = cfg.pullback_depth;
  study.dt_fine = cfg.dt_fine > 0.0 ? cfg.dt_fine : dt_min / 10.0;
  study.base_seed = cfg.base_seed + opts.seed_offset;
  study.xi = Eigen::VectorXd::Constant(built.sde.state_dim, cfg.xi);
  study.n_threads = opts.threads;

  const SchemeKind kind = parse_scheme_kind(cfg.scheme);
  ErrorTable table;
  if (cfg.truth == "oracle") {
    if (!built.has_oracle) {
      throw DomainError(
          "converge: no closed-form truth for this problem; set truth = "
          "reference and dt_ref");
    }
    table = strong_error_study(built.sde, kind, built.oracle, study);
  } else if (cfg.truth == "reference") {
    if (!(cfg.dt_ref > 0.0)) {
      throw DomainError("converge: truth = reference needs dt_ref > 0");
    }
    table = strong_error_study_reference(built.sde, kind, cfg.dt_ref, study);
  } else {
    throw DomainError("converge: truth must be 'oracle' or 'reference'");
  }
  const OrderFit fit = fit_order(table);

  const std::filesystem::path out(opts.out_dir);
  write_csv(out / "errors.csv", [&](std::ostream& os) {
    write_error_table_csv(table, os);
  });
  write_file(out / "fit.json", order_fit_to_json(fit, table));
  std::cerr << "converge: slope=" << fit.slope << " r2=" << fit.r_squared << "\n";

  if (!std::isnan(opts.assert_order)) {
    const double band = std::isnan(opts.band) ? 0.1 : opts.band;
    if (std::abs(fit.slope - opts.assert_order) > band) {
      std::cerr << "converge: fitted slope " << fit.slope << " outside "
                << opts.assert_order << " +- " << band << "\n";
      return kExitAssertion;
    }
  }
  return kExitOk;
}

int cmd_diagnose(const RunConfig& cfg, const CliOptions& opts) {
  BuiltProblem built = build_problem(cfg);
  require_constant_linear_part(built.sde);
  const ConditionReport report = require_valid(built.sde);
  const double dt_fine = cfg.dt_fine > 0.0 ? cfg.dt_fine : cfg.dt;
  const SchemeConfig scheme = make_scheme_config(
      parse_scheme_kind(cfg.scheme), cfg.dt, built.sde, report, dt_fine);

  const double start = -double(cfg.pullback_k) * built.sde.tau;
  const double t_lo = start - cfg.t_max;
  const double t_hi = std::max(cfg.pair_to, 0.0);
  const auto seeds = seed_list(cfg, opts.seed_offset);
  auto factory = [&](std::uint64_t seed) {
    return WienerPath::build(seed, built.sde.noise_dim, dt_fine, 0.0, t_lo, t_hi);
  };
  const InitialCondition xi =
      InitialCondition::deterministic(Eigen::VectorXd::Constant(built.sde.state_dim, cfg.xi));

  std::vector<double> t_grid;
  const std::int64_t n_grid = to_steps(cfg.t_max, cfg.t_step, "diagnose: t_max/t_step");
  to_steps(cfg.t_step, scheme.dt, "diagnose: t_step/dt");
  for (std::int64_t i = 0; i <= n_grid; ++i) t_grid.push_back(double(i) * cfg.t_step);

  const DiagnosticSeries series = periodicity_diagnostic(
      built.sde, scheme, factory, seeds, t_grid, start, xi, opts.threads);
  const ShiftedPair pair = shifted_pair(built.sde, scheme, factory(seeds.front()),
                                        start, cfg.pair_from, cfg.pair_to, xi);

  const std::filesystem::path out(opts.out_dir);
  write_csv(out / "series.csv", [&](std::ostream& os) {
    write_diagnostic_csv(series, os);
  });
  write_csv(out / "pair.csv", [&](std::ostream& os) { write_pair_csv(pair, os); });

  nlohmann::ordered_json j;
  j["periodicity_defect"] = series.periodicity_defect(built.sde.tau);
  j["shift_defect"] = pair.max_shift_defect(built.sde.tau);
  j["tol"] = cfg.tol;
  j["pullback_k"] = cfg.pullback_k;
  write_file(out / "summary.json", j.dump(2) + "\n");
  std::cerr << "diagnose: periodicity defect " << j["periodicity_defect"]
            << ", shift defect " << j["shift_defect"] << "\n";
  return kExitOk;
}

int cmd_measure(const RunConfig& cfg, const CliOptions& opts) {
  BuiltProblem built = build_problem(cfg);
  require_constant_linear_part(built.sde);
  if (!built.has_oracle) {
    throw DomainError(
        "measure: the weak study needs the closed-form truth of the scalar "
        "linear family");
  }
  if (cfg.dt_list.empty()) throw DomainError("measure: dt_list is required");

  MeasureStudyConfig study;
  study.dt_list = cfg.dt_list;
  study.n_samples = cfg.n_samples;
  study.r = cfg.r;
  study.pullback_depth = cfg.pullback_depth;
  const double dt_min = *std::min_element(cfg.dt_list.begin(), cfg.dt_list.end());
  study.dt_fine = cfg.dt_fine > 0.0 ? cfg.dt_fine : dt_min / 4.0;
  study.scheme_base_seed = cfg.base_seed + opts.seed_offset;
  study.oracle_base_seed = study.scheme_base_seed + std::uint64_t(cfg.n_samples) + 982451653ULL;
  study.bootstrap_resamples = cfg.bootstrap;
  study.xi = Eigen::VectorXd::Constant(built.sde.state_dim, cfg.xi);
  study.n_threads = opts.threads;

  const auto rows = periodic_measure_convergence(
      built.sde, parse_scheme_kind(cfg.scheme), built.oracle, study);

  const std::filesystem::path out(opts.out_dir);
  write_csv(out / "distances.csv", [&](std::ostream& os) {
    write_measure_rows_csv(rows, os);
  });
  nlohmann::ordered_json j;
  j["proxy_metrics"] = {
      {"weak_distance",
       "order-1 Wasserstein (W1) on sorted samples, clamped at 2; an upper "
       "bound for the bounded-Lipschitz metric"}};
  j["n_samples"] = cfg.n_samples;
  j["bootstrap_resamples"] = cfg.bootstrap;
  j["scheme_base_seed"] = study.scheme_base_seed;
  j["oracle_base_seed"] = study.oracle_base_seed;
  j["pullback_depth"] = cfg.pullback_depth;
  write_file(out / "measure.json", j.dump(2) + "\n");
  std::cerr << "measure: " << rows.size() << " rows written\n";
  return kExitOk;
}

int cmd_floquet(const RunConfig& cfg, const CliOptions& opts) {
  BuiltProblem built = build_problem(cfg);
  const double h = cfg.floquet_h > 0.0 ? cfg.floquet_h : built.sde.tau / 1000.0;

  MatrixFn a_of_t = built.sde.a_of_t;
  if (!a_of_t) {
    const Eigen::MatrixXd A = built.sde.A;
    a_of_t = [A](double) { return A; };
  }
  const auto data = std::make_shared<FloquetData>(
      build_floquet(a_of_t, built.sde.tau, h));

  nlohmann::ordered_json report;
  report["gamma"] = data->gamma;
  report["log_residual"] = data->log_residual;
  if (built.sde.has_time_varying_A()) {
    const LfTransformed transformed = lf_transform(built.sde, data);
    const ConditionReport rep = validate(transformed.problem);
    report["transformed"] = {
        {"tau", transformed.problem.tau},
        {"beta1", transformed.problem.beta1},
        {"beta2", transformed.problem.beta2},
        {"lambda1", rep.lambda1},
        {"margin", rep.margin},
        {"dt_max", rep.dt_max},
        {"pass", rep.pass},
    };
  } else {
    report["transformed"] = {
        {"note", "constant linear part; S(t) = I and B = A"}};
  }

  const std::filesystem::path out(opts.out_dir);
  std::string json_text = floquet_to_json(*data);
  // Splice the transformed-problem report into the same document.
  nlohmann::ordered_json doc = nlohmann::ordered_json::parse(json_text);
  doc["report"] = report;
  write_file(out / "floquet.json", doc.dump(2) + "\n");
  std::cerr << "floquet: gamma=" << data->gamma
            << " log_residual=" << data->log_residual << "\n";
  return kExitOk;
}

}  // namespace

int run_command(const std::string& command, const CliOptions& opts) {
  try {
    const RunConfig cfg = parse_run_config(opts.config_path, command);
    std::filesystem::create_directories(opts.out_dir);
    if (command == "simulate") return cmd_simulate(cfg, opts);
    if (command == "converge") return cmd_converge(cfg, opts);
    if (command == "diagnose") return cmd_diagnose(cfg, opts);
    if (command == "measure") return cmd_measure(cfg, opts);
    if (command == "floquet") return cmd_floquet(cfg, opts);
    std::cerr << "unknown command '" << command << "'\n";
    return kExitConfig;
  } catch (const LogarithmExistenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFloquetLog;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << " (seed " << e.seed << ", step "
              << e.step_index << ")\n";
    return kExitDivergence;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace rps

#include "rps/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rps/parallel.hpp"

namespace rps {

namespace {

double jackknife_rmse_se(const std::vector<double>& sq_errors, double sum_sq) {
  const std::size_t n = sq_errors.size();
  if (n < 2) return 0.0;
  std::vector<double> loo(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    loo[i] = std::sqrt(std::max(0.0, (sum_sq - sq_errors[i]) / double(n - 1)));
    mean += loo[i];
  }
  mean /= double(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    var += (loo[i] - mean) * (loo[i] - mean);
  }
  return std::sqrt(var * double(n - 1) / double(n));
}

void check_study_config(const StrongStudyConfig& cfg) {
  if (cfg.dt_list.empty()) throw DomainError("study: empty dt list");
  if (cfg.n_seeds < 2) throw DomainError("study: need at least 2 seeds");
  if (cfg.dt_fine <= 0.0) throw DomainError("study: dt_fine must be positive");
  if (cfg.r < 0.0) throw DomainError("study: r must be >= 0");
  if (cfg.pullback_depth < 1) throw DomainError("study: pullback depth >= 1");
}

// Runs the scheme at every dt of the study on one path and hands back the
// terminal values; truth is evaluated by the caller.
struct SeedRun {
  WienerPath path;
  std::vector<Eigen::VectorXd> values;  // one per dt
};

SeedRun run_all_dts(const SdeProblem& problem, SchemeKind kind,
                    const std::vector<SchemeConfig>& schemes,
                    const StrongStudyConfig& cfg, std::uint64_t seed) {
  (void)kind;
  const double t_start = -double(cfg.pullback_depth) * problem.tau;
  SeedRun run{WienerPath::build(seed, problem.noise_dim, cfg.dt_fine, 0.0,
                                t_start, std::max(cfg.r, 0.0)),
              {}};
  run.values.reserve(schemes.size());
  for (const auto& scheme : schemes) {
    run.values.push_back(integrate_terminal(problem, scheme, run.path, t_start,
                                            cfg.r, cfg.xi));
  }
  return run;
}

ErrorTable assemble_table(const std::vector<double>& dt_list,
                          const Eigen::MatrixXd& sq_errors) {
  ErrorTable table;
  const int n = int(sq_errors.cols());
  for (std::size_t j = 0; j < dt_list.size(); ++j) {
    std::vector<double> row(sq_errors.row(Eigen::Index(j)).begin(),
                            sq_errors.row(Eigen::Index(j)).end());
    const double sum_sq = sq_errors.row(Eigen::Index(j)).sum();
    ErrorRow out;
    out.dt = dt_list[j];
    out.rmse = std::sqrt(sum_sq / double(n));
    out.n = n;
    out.stderr_jackknife = jackknife_rmse_se(row, sum_sq);
    table.rows.push_back(out);
  }
  return table;
}

}  // namespace

ErrorTable strong_error_study(const SdeProblem& problem, SchemeKind kind,
                              const LinearScalarProblem& truth,
                              const StrongStudyConfig& cfg) {
  check_study_config(cfg);
  if (problem.state_dim != 1) {
    throw DomainError("strong_error_study: oracle truth needs a scalar problem");
  }
  const ConditionReport report = require_valid(problem);
  std::vector<SchemeConfig> schemes;
  for (double dt : cfg.dt_list) {
    schemes.push_back(make_scheme_config(kind, dt, problem, report, cfg.dt_fine));
  }
  const double horizon = double(cfg.pullback_depth) * problem.tau + cfg.r;

  Eigen::MatrixXd sq_errors(Eigen::Index(cfg.dt_list.size()),
                            Eigen::Index(cfg.n_seeds));
  parallel_for(std::size_t(cfg.n_seeds), cfg.n_threads, [&](std::size_t i) {
    const SeedRun run =
        run_all_dts(problem, kind, schemes, cfg, cfg.base_seed + i);
    const double star = exact_rps(truth, run.path, cfg.r, horizon).value;
    for (std::size_t j = 0; j < schemes.size(); ++j) {
      const double e = run.values[j][0] - star;
      sq_errors(Eigen::Index(j), Eigen::Index(i)) = e * e;
    }
  });
  return assemble_table(cfg.dt_list, sq_errors);
}

ErrorTable strong_error_study_reference(const SdeProblem& problem,
                                        SchemeKind kind, double dt_ref,
                                        const StrongStudyConfig& cfg) {
  check_study_config(cfg);
  const double dt_min = *std::min_element(cfg.dt_list.begin(), cfg.dt_list.end());
  if (dt_ref > dt_min / 8.0 * (1.0 + 1e-12)) {
    throw DomainError("strong_error_study: reference dt must be <= min(dt)/8");
  }
  const ConditionReport report = require_valid(problem);
  std::vector<SchemeConfig> schemes;
  for (double dt : cfg.dt_list) {
    schemes.push_back(make_scheme_config(kind, dt, problem, report, cfg.dt_fine));
  }
  const SchemeConfig ref = make_scheme_config(SchemeKind::ModifiedMilstein,
                                              dt_ref, problem, report,
                                              cfg.dt_fine);
  const double t_start = -double(cfg.pullback_depth) * problem.tau;

  Eigen::MatrixXd sq_errors(Eigen::Index(cfg.dt_list.size()),
                            Eigen::Index(cfg.n_seeds));
  parallel_for(std::size_t(cfg.n_seeds), cfg.n_threads, [&](std::size_t i) {
    const SeedRun run =
        run_all_dts(problem, kind, schemes, cfg, cfg.base_seed + i);
    const Eigen::VectorXd star = integrate_terminal(problem, ref, run.path,
                                                    t_start, cfg.r, cfg.xi);
    for (std::size_t j = 0; j < schemes.size(); ++j) {
      sq_errors(Eigen::Index(j), Eigen::Index(i)) =
          (run.values[j] - star).squaredNorm();
    }
  });
  return assemble_table(cfg.dt_list, sq_errors);
}

OrderFit fit_order(const ErrorTable& table) {
  if (table.rows.size() < 3) {
    throw DomainError("fit_order: need at least 3 rows");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& row : table.rows) {
    if (!(row.rmse > 0.0)) {
      throw DegenerateFitError("fit_order: zero RMSE row");
    }
    if (!(row.dt > 0.0)) throw DomainError("fit_order: nonpositive dt");
    const double x = std::log(row.dt);
    const double y = std::log(row.rmse);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double n = double(table.rows.size());
  const double denom = n * sxx - sx * sx;
  OrderFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0;
  for (const auto& row : table.rows) {
    const double pred = fit.intercept + fit.slope * std::log(row.dt);
    const double resid = std::log(row.rmse) - pred;
    ss_res += resid * resid;
  }
  const double ss_tot = syy - sy * sy / n;
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

EmpiricalMeasure EmpiricalMeasure::from_samples(const Eigen::MatrixXd& samples) {
  if (samples.cols() < 1) throw DomainError("empirical_measure: empty sample set");
  if (!samples.allFinite()) throw DomainError("empirical_measure: non-finite samples");
  EmpiricalMeasure m;
  m.samples_ = samples;
  m.sorted_.resize(size_t(samples.rows()));
  for (Eigen::Index c = 0; c < samples.rows(); ++c) {
    m.sorted_[size_t(c)].assign(samples.row(c).begin(), samples.row(c).end());
    std::sort(m.sorted_[size_t(c)].begin(), m.sorted_[size_t(c)].end());
  }
  return m;
}

namespace {

// Exact order-1 Wasserstein distance between two 1-d empirical measures
// with uniform weights: the area between the empirical CDFs.
double wasserstein1_sorted(const std::vector<double>& a,
                           const std::vector<double>& b) {
  const double wa = 1.0 / double(a.size());
  const double wb = 1.0 / double(b.size());
  std::size_t ia = 0, ib = 0;
  double fa = 0.0, fb = 0.0;
  double prev = std::min(a[0], b[0]);
  double dist = 0.0;
  while (ia < a.size() || ib < b.size()) {
    double x;
    if (ib >= b.size() || (ia < a.size() && a[ia] <= b[ib])) {
      x = a[ia];
    } else {
      x = b[ib];
    }
    dist += std::abs(fa - fb) * (x - prev);
    prev = x;
    while (ia < a.size() && a[ia] == x) {
      fa += wa;
      ++ia;
    }
    while (ib < b.size() && b[ib] == x) {
      fb += wb;
      ++ib;
    }
  }
  return dist;
}

}  // namespace

double weak_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.dim() != nu.dim()) {
    throw DomainError("weak_distance: dimension mismatch");
  }
  double worst = 0.0;
  for (int c = 0; c < mu.dim(); ++c) {
    worst = std::max(
        worst, wasserstein1_sorted(mu.sorted_marginal(c), nu.sorted_marginal(c)));
  }
  // The bounded-Lipschitz class caps the distance at 2 (|phi| <= 1).
  return std::min(worst, 2.0);
}

std::vector<MeasureRow> periodic_measure_convergence(
    const SdeProblem& problem, SchemeKind kind,
    const LinearScalarProblem& truth, const MeasureStudyConfig& cfg) {
  if (cfg.dt_list.empty()) throw DomainError("measure study: empty dt list");
  if (cfg.n_samples < 2) throw DomainError("measure study: need >= 2 samples");
  if (problem.state_dim != 1) {
    throw DomainError("measure study: oracle truth needs a scalar problem");
  }
  const ConditionReport report = require_valid(problem);
  const double t_start = -double(cfg.pullback_depth) * problem.tau;
  const double horizon = double(cfg.pullback_depth) * problem.tau + cfg.r;

  // Oracle sample cloud, computed once; the law does not depend on dt.
  Eigen::MatrixXd star(1, cfg.n_samples);
  parallel_for(std::size_t(cfg.n_samples), cfg.n_threads, [&](std::size_t i) {
    const WienerPath path =
        WienerPath::build(cfg.oracle_base_seed + i, problem.noise_dim,
                          cfg.dt_fine, 0.0, t_start, std::max(cfg.r, 0.0));
    star(0, Eigen::Index(i)) = exact_rps(truth, path, cfg.r, horizon).value;
  });
  const EmpiricalMeasure rho_star = EmpiricalMeasure::from_samples(star);

  std::vector<MeasureRow> rows;
  for (double dt : cfg.dt_list) {
    // The scheme cloud rides its own coarse grid; no oracle quadrature is
    // needed on these paths.
    const SchemeConfig scheme = make_scheme_config(kind, dt, problem, report, dt);
    Eigen::MatrixXd hat(1, cfg.n_samples);
    parallel_for(std::size_t(cfg.n_samples), cfg.n_threads, [&](std::size_t i) {
      const WienerPath path =
          WienerPath::build(cfg.scheme_base_seed + i, problem.noise_dim, dt,
                            0.0, t_start, std::max(cfg.r, 0.0));
      hat(0, Eigen::Index(i)) =
          integrate_terminal(problem, scheme, path, t_start, cfg.r, cfg.xi)[0];
    });
    const EmpiricalMeasure rho_hat = EmpiricalMeasure::from_samples(hat);

    MeasureRow row;
    row.dt = dt;
    row.distance = weak_distance(rho_hat, rho_star);

    // Bootstrap both clouds with fixed per-resample seeds.
    const int B = cfg.bootstrap_resamples;
    std::vector<double> boot(std::size_t(B), 0.0);
    parallel_for(std::size_t(B), cfg.n_threads, [&](std::size_t b) {
      std::mt19937_64 rng(mix_seed(cfg.bootstrap_seed ^ (0x1000003ULL * (b + 1))));
      std::uniform_int_distribution<int> pick(0, cfg.n_samples - 1);
      Eigen::MatrixXd h(1, cfg.n_samples), s(1, cfg.n_samples);
      for (int i = 0; i < cfg.n_samples; ++i) {
        h(0, i) = hat(0, pick(rng));
        s(0, i) = star(0, pick(rng));
      }
      boot[b] = weak_distance(EmpiricalMeasure::from_samples(h),
                              EmpiricalMeasure::from_samples(s));
    });
    std::sort(boot.begin(), boot.end());
    double mean = 0.0;
    for (double v : boot) mean += v;
    mean /= double(B);
    double var = 0.0;
    for (double v : boot) var += (v - mean) * (v - mean);
    row.se = std::sqrt(var / double(B - 1));
    row.ci_lo = boot[size_t(std::floor(0.025 * (B - 1)))];
    row.ci_hi = boot[size_t(std::ceil(0.975 * (B - 1)))];
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rps

#include "rps/pullback.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "rps/parallel.hpp"

namespace rps {

namespace {

double ols_ratio(const std::vector<double>& gaps) {
  // log-linear fit of gap index -> log gap; slope exponentiates to the
  // per-period decay ratio.
  const std::size_t n = gaps.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = double(i);
    const double y = std::log(gaps[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = double(n) * sxx - sx * sx;
  return std::exp((double(n) * sxy - sx * sy) / denom);
}

}  // namespace

double PullbackResult::fitted_gap_ratio() const {
  if (cauchy_gaps.size() < 3) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::vector<double> tail(cauchy_gaps.begin() + 1, cauchy_gaps.end());
  return ols_ratio(tail);
}

PullbackResult pullback_rps(const SdeProblem& problem,
                            const SchemeConfig& scheme,
                            const PathFactory& paths,
                            const std::vector<std::uint64_t>& seeds, double r,
                            int k_max, double tol, const InitialCondition& xi,
                            int n_threads) {
  if (seeds.empty()) throw DomainError("pullback_rps: empty seed list");
  if (k_max < 1) throw DomainError("pullback_rps: k_max must be >= 1");
  require_valid(problem);

  const std::size_t n = seeds.size();
  const int m = problem.state_dim;

  PullbackResult result;
  result.r = r;
  result.dt = scheme.dt;
  result.seeds = seeds;

  std::vector<std::optional<WienerPath>> ensemble(n);
  Eigen::MatrixXd current(m, Eigen::Index(n));
  Eigen::MatrixXd previous(m, Eigen::Index(n));

  for (int k = 1; k <= k_max; ++k) {
    const double t_start = -double(k) * problem.tau;
    parallel_for(n, n_threads, [&](std::size_t i) {
      if (!ensemble[i]) ensemble[i] = paths(seeds[i]);
      current.col(Eigen::Index(i)) = integrate_terminal(
          problem, scheme, *ensemble[i], t_start, r, xi.sample(seeds[i]));
    });
    result.k_used = k;
    if (k > 1) {
      const double gap =
          std::sqrt((current - previous).squaredNorm() / double(n));
      result.cauchy_gaps.push_back(gap);
      if (gap < tol) {
        result.converged = true;
        break;
      }
    }
    previous = current;
  }
  result.values = current;
  return result;
}

PullbackResult pullback_rps(const SdeProblem& problem,
                            const SchemeConfig& scheme,
                            const std::vector<WienerPath>& paths, double r,
                            int k_max, double tol, const InitialCondition& xi,
                            int n_threads) {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(paths.size());
  for (const auto& p : paths) seeds.push_back(p.seed());
  auto factory = [&paths, &seeds](std::uint64_t seed) -> WienerPath {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      if (seeds[i] == seed) return paths[i];
    }
    throw DomainError("pullback_rps: seed not present in ensemble");
  };
  return pullback_rps(problem, scheme, factory, seeds, r, k_max, tol, xi,
                      n_threads);
}

double DiagnosticSeries::periodicity_defect(double tau) const {
  if (t_grid.size() < 2) return 0.0;
  const double dt_grid = t_grid[1] - t_grid[0];
  const std::int64_t stride = to_steps(tau, dt_grid, "diagnostic grid period");
  double defect = 0.0;
  for (Eigen::Index row = 0; row < values.rows(); ++row) {
    for (std::size_t i = 0; i + std::size_t(stride) < t_grid.size(); ++i) {
      defect = std::max(defect, std::abs(values(row, Eigen::Index(i + stride)) -
                                         values(row, Eigen::Index(i))));
    }
  }
  return defect;
}

DiagnosticSeries periodicity_diagnostic(const SdeProblem& problem,
                                        const SchemeConfig& scheme,
                                        const PathFactory& paths,
                                        const std::vector<std::uint64_t>& seeds,
                                        const std::vector<double>& t_grid,
                                        double pullback_start,
                                        const InitialCondition& xi,
                                        int n_threads) {
  if (problem.state_dim != 1) {
    throw DomainError("periodicity_diagnostic: scalar-state problems only");
  }
  if (t_grid.empty()) throw DomainError("periodicity_diagnostic: empty grid");

  DiagnosticSeries series;
  series.t_grid = t_grid;
  series.seeds = seeds;
  series.values.resize(Eigen::Index(seeds.size()), Eigen::Index(t_grid.size()));

  parallel_for(seeds.size(), n_threads, [&](std::size_t i) {
    const WienerPath path = paths(seeds[i]);
    const Eigen::VectorXd x0 = xi.sample(seeds[i]);
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
      const double t = t_grid[j];
      const std::int64_t n_shift = to_steps(t, path.dt_fine(), "diagnostic time");
      const WienerPath shifted = path.shift(-n_shift);
      series.values(Eigen::Index(i), Eigen::Index(j)) = integrate_terminal(
          problem, scheme, shifted, pullback_start, t, x0)[0];
    }
  });
  return series;
}

double ShiftedPair::max_shift_defect(double tau) const {
  const double dt = base.scheme.dt;
  const std::int64_t stride = to_steps(tau, dt, "shifted pair period");
  double defect = 0.0;
  // shifted(t) should replay base(t - tau); compare over the overlap.
  for (std::size_t j = 0; j < shifted.times.size(); ++j) {
    const std::int64_t j_base = std::int64_t(j) - stride;
    if (j_base < 0 || std::size_t(j_base) >= base.times.size()) continue;
    defect = std::max(defect,
                      (shifted.states.col(Eigen::Index(j)) -
                       base.states.col(Eigen::Index(j_base)))
                          .cwiseAbs()
                          .maxCoeff());
  }
  return defect;
}

namespace {

Trajectory crop(const Trajectory& traj, double from) {
  std::size_t first = 0;
  while (first < traj.times.size() && traj.times[first] < from - 1e-12) ++first;
  Trajectory out;
  out.scheme = traj.scheme;
  out.seed = traj.seed;
  out.times.assign(traj.times.begin() + std::ptrdiff_t(first), traj.times.end());
  out.states = traj.states.rightCols(traj.states.cols() - Eigen::Index(first));
  return out;
}

}  // namespace

ShiftedPair shifted_pair(const SdeProblem& problem, const SchemeConfig& scheme,
                         const WienerPath& path, double pullback_start,
                         double record_from, double record_to,
                         const InitialCondition& xi) {
  const std::int64_t tau_steps =
      to_steps(problem.tau, path.dt_fine(), "shifted pair period");
  const WienerPath shifted = path.shift(-tau_steps);
  const Eigen::VectorXd x0 = xi.sample(path.seed());

  ShiftedPair pair;
  pair.base = crop(
      integrate(problem, scheme, path, pullback_start, record_to, x0),
      record_from);
  pair.shifted = crop(
      integrate(problem, scheme, shifted, pullback_start, record_to, x0),
      record_from);
  return pair;
}

}  // namespace rps

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "rps/model.hpp"
#include "rps/schemes.hpp"
#include "rps/wiener.hpp"

namespace rps {

// Outcome of the pull-back driver: the approximated random periodic
// values at the target time, one per seed, plus the L2 Cauchy gaps
// between consecutive pull-back depths (pathwise-coupled Monte Carlo
// estimates).
struct PullbackResult {
  double r = 0.0;
  double dt = 0.0;
  int k_used = 0;
  bool converged = false;
  std::vector<double> cauchy_gaps;  // gap[i] = ||X^{-(i+1)tau} - X^{-(i+2)tau}||_2
  Eigen::MatrixXd values;           // state_dim x n_seeds, at depth k_used
  std::vector<std::uint64_t> seeds;

  // Per-period decay ratio fitted on log gaps, discarding the first gap
  // as transient. Needs at least two retained gaps.
  double fitted_gap_ratio() const;
};

using PathFactory = std::function<WienerPath(std::uint64_t seed)>;

// Deepens the pull-back one period at a time: integrates every seed from
// -k*tau to r, estimates the coupled L2 gap against the previous depth,
// and stops when the gap drops below tol or k reaches k_max. Reaching
// k_max without tol is reported as converged = false, not an error.
PullbackResult pullback_rps(const SdeProblem& problem,
                            const SchemeConfig& scheme,
                            const PathFactory& paths,
                            const std::vector<std::uint64_t>& seeds, double r,
                            int k_max, double tol, const InitialCondition& xi,
                            int n_threads = 0);

// Convenience overload over a prebuilt ensemble.
PullbackResult pullback_rps(const SdeProblem& problem,
                            const SchemeConfig& scheme,
                            const std::vector<WienerPath>& paths, double r,
                            int k_max, double tol, const InitialCondition& xi,
                            int n_threads = 0);

// One row per grid time t: the pull-back value at t computed on the path
// shifted by theta_{-t}. A random periodic path makes this series
// tau-periodic up to the pull-back truncation error.
struct DiagnosticSeries {
  std::vector<double> t_grid;
  Eigen::MatrixXd values;  // n_seeds rows x t_grid.size() cols (scalar state)
  std::vector<std::uint64_t> seeds;

  // max_t |series(t + tau) - series(t)| over rows, for grid pairs.
  double periodicity_defect(double tau) const;
};

DiagnosticSeries periodicity_diagnostic(const SdeProblem& problem,
                                        const SchemeConfig& scheme,
                                        const PathFactory& paths,
                                        const std::vector<std::uint64_t>& seeds,
                                        const std::vector<double>& t_grid,
                                        double pullback_start,
                                        const InitialCondition& xi,
                                        int n_threads = 0);

// The two trajectories behind the repeat-with-a-shift picture: the
// pull-back run on omega and on theta_{-tau}(omega), both recorded over
// [record_from, record_to] after starting at pullback_start.
struct ShiftedPair {
  Trajectory base;     // on omega
  Trajectory shifted;  // on theta_{-tau} omega

  // max over the overlap of |shifted(t) - base(t - tau)|.
  double max_shift_defect(double tau) const;
};

ShiftedPair shifted_pair(const SdeProblem& problem, const SchemeConfig& scheme,
                         const WienerPath& path, double pullback_start,
                         double record_from, double record_to,
                         const InitialCondition& xi);

}  // namespace rps

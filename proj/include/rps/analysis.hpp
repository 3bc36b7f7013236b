#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "rps/model.hpp"
#include "rps/oracle.hpp"
#include "rps/schemes.hpp"

namespace rps {

struct ErrorRow {
  double dt = 0.0;
  double rmse = 0.0;
  int n = 0;
  double stderr_jackknife = 0.0;
};

struct ErrorTable {
  std::vector<ErrorRow> rows;
};

struct StrongStudyConfig {
  std::vector<double> dt_list;
  int n_seeds = 1000;
  double r = 0.0;
  int pullback_depth = 3;   // integrate from -depth*tau
  double dt_fine = 0.0;     // path grid; also the oracle quadrature step
  std::uint64_t base_seed = 1;
  Eigen::VectorXd xi;
  int n_threads = 0;
};

// RMSE per step size of |X_hat_r - X*_r| over coupled seeds (scheme and
// oracle ride the same path). Standard errors by leave-one-out jackknife.
ErrorTable strong_error_study(const SdeProblem& problem, SchemeKind kind,
                              const LinearScalarProblem& truth,
                              const StrongStudyConfig& cfg);

// Surrogate-truth mode for problems without a closed-form oracle: the
// reference is the modified Milstein scheme at dt_ref, which must be at
// most min(dt_list)/8.
ErrorTable strong_error_study_reference(const SdeProblem& problem,
                                        SchemeKind kind, double dt_ref,
                                        const StrongStudyConfig& cfg);

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;  // in log space
  double r_squared = 0.0;
};

// Ordinary least squares on (log dt, log rmse).
OrderFit fit_order(const ErrorTable& table);

// A uniformly weighted sample cloud with per-coordinate sorted copies,
// the empirical stand-in for the periodic measure at one time.
class EmpiricalMeasure {
 public:
  static EmpiricalMeasure from_samples(const Eigen::MatrixXd& samples);

  int dim() const { return int(samples_.rows()); }
  int size() const { return int(samples_.cols()); }
  const Eigen::MatrixXd& samples() const { return samples_; }
  const std::vector<double>& sorted_marginal(int coord) const {
    return sorted_[size_t(coord)];
  }

 private:
  Eigen::MatrixXd samples_;  // dim x n
  std::vector<std::vector<double>> sorted_;
};

// Computable upper bound min(W1, 2) for the bounded-Lipschitz distance:
// exact order-1 Wasserstein between the marginals (CDF-difference
// integral on sorted samples), maximised over coordinates for dim > 1.
double weak_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

struct MeasureRow {
  double dt = 0.0;
  double distance = 0.0;
  double ci_lo = 0.0;   // bootstrap 95% band
  double ci_hi = 0.0;
  double se = 0.0;      // bootstrap standard error
};

struct MeasureStudyConfig {
  std::vector<double> dt_list;
  int n_samples = 5000;
  double r = 0.0;
  int pullback_depth = 3;
  double dt_fine = 0.0;  // oracle quadrature grid
  std::uint64_t scheme_base_seed = 1;
  std::uint64_t oracle_base_seed = 1000001;  // uncoupled from the scheme set
  int bootstrap_resamples = 500;
  std::uint64_t bootstrap_seed = 7;
  Eigen::VectorXd xi;
  int n_threads = 0;
};

// Distance between the empirical law of the scheme values and of the
// oracle values, per step size, with independent seed sets on the two
// sides (the metric compares laws, not coupled paths).
std::vector<MeasureRow> periodic_measure_convergence(
    const SdeProblem& problem, SchemeKind kind,
    const LinearScalarProblem& truth, const MeasureStudyConfig& cfg);

}  // namespace rps

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "rps/model.hpp"
#include "rps/wiener.hpp"

namespace rps {

enum class SchemeKind { EulerMaruyama, ModifiedMilstein };

struct SchemeConfig {
  SchemeKind kind = SchemeKind::EulerMaruyama;
  double dt = 0.0;
  std::int64_t coarse_factor = 1;  // dt / dt_fine
};

// Validates dt against the step bound dt_max = 1/rho, the period (tau/dt
// integral) and the fine grid (dt/dt_fine integral).
SchemeConfig make_scheme_config(SchemeKind kind, double dt,
                                const SdeProblem& problem,
                                const ConditionReport& report, double dt_fine);

struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd states;  // state_dim x times.size()
  SchemeConfig scheme;
  std::uint64_t seed = 0;
};

struct IntegrateOptions {
  // The partial step to an off-grid end time advances drift and noise but
  // not the linear term, exactly as the update rule is stated; setting
  // this adds the A*x*(r - N'*dt) increment instead.
  bool include_linear_in_fractional_step = false;
};

// One Euler-Maruyama step: x + A x dt + f(t,x) dt + g(t,x) dW.
Eigen::VectorXd em_step(const SdeProblem& problem, double t,
                        const Eigen::VectorXd& x, const Eigen::VectorXd& dW,
                        double dt);

// Supporting stage values U+- = x + A x dt + f dt +- g sqrt(dt); written
// for scalar noise (for d > 1 the integrator applies stages column-wise).
std::pair<Eigen::VectorXd, Eigen::VectorXd> milstein_stages(
    const SdeProblem& problem, double t, const Eigen::VectorXd& x, double dt);

// Derivative-free modified Milstein step: the EM step plus
//   dZ/(2 sqrt(dt)) * [f(t,U+) - f(t,U-)]
//   + (dW^2 - dt)/(4 sqrt(dt)) * [g(t,U+) - g(t,U-)].
Eigen::VectorXd milstein_step(const SdeProblem& problem, double t,
                              const Eigen::VectorXd& x,
                              const Eigen::VectorXd& dW,
                              const Eigen::VectorXd& dZ, double dt);

// Steps from t_start to t_end on the dt grid (t_start must sit on the
// global dt grid, both ends on the fine grid). If t_end falls strictly
// between dt nodes the last state is produced by the partial step.
Trajectory integrate(const SdeProblem& problem, const SchemeConfig& scheme,
                     const WienerPath& path, double t_start, double t_end,
                     const Eigen::VectorXd& xi,
                     const IntegrateOptions& opts = {});

// Same walk without recording; returns the final state only.
Eigen::VectorXd integrate_terminal(const SdeProblem& problem,
                                   const SchemeConfig& scheme,
                                   const WienerPath& path, double t_start,
                                   double t_end, const Eigen::VectorXd& xi,
                                   const IntegrateOptions& opts = {});

namespace detail {

// Reusable stepping kernel; owns the evaluation buffers so the per-step
// cost is free of allocation. The public step functions and integrate()
// all route through this so degenerate-case identities (Milstein == EM
// for state-independent coefficients) hold bitwise.
class Stepper {
 public:
  Stepper(const SdeProblem& problem, SchemeKind kind);

  // Advances x in place. dW has noise_dim entries; dZ may be empty for
  // Euler-Maruyama.
  void step(double t, double dt, const Eigen::VectorXd& dW,
            const Eigen::VectorXd& dZ, Eigen::VectorXd& x);

  // The partial step of the remainder r - t with the off-grid increment.
  void fractional_step(double t, double dt_rem, const Eigen::VectorXd& dW,
                       bool include_linear, Eigen::VectorXd& x);

 private:
  void linear_part(double t, const Eigen::VectorXd& x);

  const SdeProblem& problem_;
  SchemeKind kind_;
  Eigen::MatrixXd a_buf_;
  Eigen::VectorXd ax_, fx_, gdw_, base_, uplus_, uminus_, fplus_, fminus_, corr_;
  Eigen::MatrixXd gx_, gplus_, gminus_;
};

}  // namespace detail
}  // namespace rps

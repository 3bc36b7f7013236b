#include "rps/schemes.hpp"

#include <cmath>
#include <sstream>

namespace rps {

SchemeConfig make_scheme_config(SchemeKind kind, double dt,
                                const SdeProblem& problem,
                                const ConditionReport& report,
                                double dt_fine) {
  if (dt <= 0.0) throw DomainError("scheme: dt must be positive");
  if (dt > report.dt_max * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "scheme: dt = " << dt << " exceeds dt_max = 1/rho = " << report.dt_max;
    throw GridAlignmentError(msg.str());
  }
  to_steps(problem.tau, dt, "scheme: tau/dt");
  const std::int64_t m = to_steps(dt, dt_fine, "scheme: dt/dt_fine");
  if (m < 1) throw GridAlignmentError("scheme: dt must be >= dt_fine");
  if (kind == SchemeKind::ModifiedMilstein && !problem.milstein_ready) {
    throw DomainError(
        "scheme: modified-milstein needs bounded first x-derivatives of f "
        "and g (problem.milstein_ready)");
  }
  return SchemeConfig{kind, dt, m};
}

namespace detail {

Stepper::Stepper(const SdeProblem& problem, SchemeKind kind)
    : problem_(problem), kind_(kind) {
  const int m = problem.state_dim;
  const int d = problem.noise_dim;
  ax_.resize(m);
  fx_.resize(m);
  gdw_.resize(m);
  gx_.resize(m, d);
  if (kind_ == SchemeKind::ModifiedMilstein) {
    base_.resize(m);
    uplus_.resize(m);
    uminus_.resize(m);
    fplus_.resize(m);
    fminus_.resize(m);
    corr_.resize(m);
    gplus_.resize(m, d);
    gminus_.resize(m, d);
  }
}

void Stepper::linear_part(double t, const Eigen::VectorXd& x) {
  if (problem_.has_time_varying_A()) {
    a_buf_ = problem_.a_of_t(t);
    ax_.noalias() = a_buf_ * x;
  } else {
    ax_.noalias() = problem_.A * x;
  }
}

void Stepper::step(double t, double dt, const Eigen::VectorXd& dW,
                   const Eigen::VectorXd& dZ, Eigen::VectorXd& x) {
  linear_part(t, x);
  problem_.drift(t, x, fx_);
  problem_.diffusion(t, x, gx_);
  gdw_.noalias() = gx_ * dW;

  if (kind_ == SchemeKind::EulerMaruyama) {
    x += dt * ax_ + dt * fx_ + gdw_;
    return;
  }

  // Modified Milstein: the EM increment plus the two stage-difference
  // corrections, accumulated separately so they vanish exactly when f
  // and g are state-independent.
  const double sqrt_dt = std::sqrt(dt);
  base_ = x + dt * ax_ + dt * fx_;
  corr_.setZero();
  for (int j = 0; j < problem_.noise_dim; ++j) {
    uplus_ = base_ + sqrt_dt * gx_.col(j);
    uminus_ = base_ - sqrt_dt * gx_.col(j);
    problem_.drift(t, uplus_, fplus_);
    problem_.drift(t, uminus_, fminus_);
    problem_.diffusion(t, uplus_, gplus_);
    problem_.diffusion(t, uminus_, gminus_);
    corr_ += (dZ[j] / (2.0 * sqrt_dt)) * (fplus_ - fminus_);
    corr_ += ((dW[j] * dW[j] - dt) / (4.0 * sqrt_dt)) *
             (gplus_.col(j) - gminus_.col(j));
  }
  x += dt * ax_ + dt * fx_ + gdw_;
  x += corr_;
}

void Stepper::fractional_step(double t, double dt_rem,
                              const Eigen::VectorXd& dW, bool include_linear,
                              Eigen::VectorXd& x) {
  problem_.drift(t, x, fx_);
  problem_.diffusion(t, x, gx_);
  gdw_.noalias() = gx_ * dW;
  if (include_linear) {
    linear_part(t, x);
    x += dt_rem * ax_;
  }
  x += dt_rem * fx_ + gdw_;
}

}  // namespace detail

Eigen::VectorXd em_step(const SdeProblem& problem, double t,
                        const Eigen::VectorXd& x, const Eigen::VectorXd& dW,
                        double dt) {
  detail::Stepper stepper(problem, SchemeKind::EulerMaruyama);
  Eigen::VectorXd out = x;
  stepper.step(t, dt, dW, Eigen::VectorXd(), out);
  if (!out.allFinite()) throw DivergenceError("em_step: non-finite state");
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> milstein_stages(
    const SdeProblem& problem, double t, const Eigen::VectorXd& x, double dt) {
  Eigen::VectorXd ax(problem.state_dim), fx(problem.state_dim);
  Eigen::MatrixXd gx(problem.state_dim, problem.noise_dim);
  if (problem.has_time_varying_A()) {
    ax.noalias() = problem.a_of_t(t) * x;
  } else {
    ax.noalias() = problem.A * x;
  }
  problem.drift(t, x, fx);
  problem.diffusion(t, x, gx);
  const double sqrt_dt = std::sqrt(dt);
  Eigen::VectorXd base = x + dt * ax + dt * fx;
  return {base + sqrt_dt * gx.col(0), base - sqrt_dt * gx.col(0)};
}

Eigen::VectorXd milstein_step(const SdeProblem& problem, double t,
                              const Eigen::VectorXd& x,
                              const Eigen::VectorXd& dW,
                              const Eigen::VectorXd& dZ, double dt) {
  detail::Stepper stepper(problem, SchemeKind::ModifiedMilstein);
  Eigen::VectorXd out = x;
  stepper.step(t, dt, dW, dZ, out);
  if (!out.allFinite()) throw DivergenceError("milstein_step: non-finite state");
  return out;
}

namespace {

struct Walk {
  std::int64_t i0;       // global dt-grid index of t_start
  std::int64_t n_full;   // full dt steps
  bool fractional;       // partial step to t_end needed
  std::int64_t rem_fine; // fine steps of the remainder
};

Walk plan_walk(const SchemeConfig& scheme, const WienerPath& path,
               double t_start, double t_end) {
  if (t_end < t_start) throw DomainError("integrate: t_end < t_start");
  const std::int64_t i0 = to_steps(t_start, scheme.dt, "integrate: t_start/dt");
  const std::int64_t k_start = path.steps_from_anchor(t_start);
  const std::int64_t k_end = path.steps_from_anchor(t_end);
  const std::int64_t fine_span = k_end - k_start;
  const std::int64_t n_full = fine_span / scheme.coarse_factor;
  const std::int64_t rem = fine_span - n_full * scheme.coarse_factor;
  return Walk{i0, n_full, rem != 0, rem};
}

template <typename OnNode>
void run_walk(const SdeProblem& problem, const SchemeConfig& scheme,
              const WienerPath& path, double t_start, double t_end,
              const Eigen::VectorXd& xi, const IntegrateOptions& opts,
              OnNode&& on_node) {
  const Walk walk = plan_walk(scheme, path, t_start, t_end);
  detail::Stepper stepper(problem, scheme.kind);
  const bool milstein = scheme.kind == SchemeKind::ModifiedMilstein;

  Eigen::VectorXd x = xi;
  Eigen::VectorXd dz;  // stays empty for Euler-Maruyama
  double t = double(walk.i0) * scheme.dt;
  on_node(t_start, x);
  for (std::int64_t i = 0; i < walk.n_full; ++i) {
    t = double(walk.i0 + i) * scheme.dt;
    const Eigen::VectorXd dw = path.coarse_increment(t, scheme.coarse_factor);
    if (milstein) dz = path.delta_z(t, scheme.coarse_factor);
    stepper.step(t, scheme.dt, dw, dz, x);
    if (!x.allFinite()) {
      throw DivergenceError("integrate: non-finite state", i,
                            double(walk.i0 + i + 1) * scheme.dt, path.seed());
    }
    on_node(double(walk.i0 + i + 1) * scheme.dt, x);
  }
  if (walk.fractional) {
    t = double(walk.i0 + walk.n_full) * scheme.dt;
    const Eigen::VectorXd dw = path.coarse_increment(t, walk.rem_fine);
    const double dt_rem = double(walk.rem_fine) * path.dt_fine();
    stepper.fractional_step(t, dt_rem, dw, opts.include_linear_in_fractional_step, x);
    if (!x.allFinite()) {
      throw DivergenceError("integrate: non-finite state in partial step",
                            walk.n_full, t_end, path.seed());
    }
    on_node(t_end, x);
  }
}

}  // namespace

Trajectory integrate(const SdeProblem& problem, const SchemeConfig& scheme,
                     const WienerPath& path, double t_start, double t_end,
                     const Eigen::VectorXd& xi, const IntegrateOptions& opts) {
  Trajectory traj;
  traj.scheme = scheme;
  traj.seed = path.seed();
  std::vector<Eigen::VectorXd> nodes;
  run_walk(problem, scheme, path, t_start, t_end, xi, opts,
           [&](double t, const Eigen::VectorXd& x) {
             traj.times.push_back(t);
             nodes.push_back(x);
           });
  traj.states.resize(problem.state_dim, Eigen::Index(nodes.size()));
  for (size_t i = 0; i < nodes.size(); ++i) {
    traj.states.col(Eigen::Index(i)) = nodes[i];
  }
  return traj;
}

Eigen::VectorXd integrate_terminal(const SdeProblem& problem,
                                   const SchemeConfig& scheme,
                                   const WienerPath& path, double t_start,
                                   double t_end, const Eigen::VectorXd& xi,
                                   const IntegrateOptions& opts) {
  Eigen::VectorXd last = xi;
  run_walk(problem, scheme, path, t_start, t_end, xi, opts,
           [&](double, const Eigen::VectorXd& x) { last = x; });
  return last;
}

}  // namespace rps

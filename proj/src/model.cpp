#include "rps/model.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "rps/wiener.hpp"

namespace rps {

namespace {

constexpr double kSymTol = 1e-12;
constexpr double kPeriodTol = 1e-10;
constexpr int kPeriodProbes = 16;

// Evaluates the constant linear part; validate() does not handle a_of_t
// directly (the Floquet pipeline reduces those problems first).
const Eigen::MatrixXd& constant_A(const SdeProblem& p) {
  if (p.has_time_varying_A()) {
    throw ConditionError("A",
        "validate: problem has a time-varying linear part; apply the "
        "Lyapunov-Floquet reduction first");
  }
  if (p.A.rows() != p.state_dim || p.A.cols() != p.state_dim) {
    throw ConditionError("A", "validate: A has wrong dimensions");
  }
  return p.A;
}

}  // namespace

ConditionReport validate(const SdeProblem& problem) {
  ConditionReport rep;
  const Eigen::MatrixXd& A = constant_A(problem);

  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymTol) {
    std::ostringstream msg;
    msg << "Condition (A): A is not symmetric, max |A - A^T| = " << asym;
    throw ConditionError("A", msg.str());
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const Eigen::VectorXd ev = es.eigenvalues();  // ascending
  rep.lambda_m = ev[0];
  rep.lambda1 = ev[ev.size() - 1];
  if (rep.lambda1 >= 0.0) {
    std::ostringstream msg;
    msg << "Condition (A): largest eigenvalue " << rep.lambda1
        << " is not strictly negative";
    throw ConditionError("A", msg.str());
  }
  rep.checks.push_back({"A", true, "A symmetric with strictly negative spectrum"});

  rep.rho = std::abs(rep.lambda_m);
  rep.dt_max = 1.0 / rep.rho;
  const double lip_load = problem.beta1 + 0.5 * problem.beta2 * problem.beta2;
  rep.margin = std::abs(rep.lambda1) - lip_load;
  rep.alpha = 0.5 * (lip_load + std::abs(rep.lambda1));
  {
    std::ostringstream detail;
    detail << "margin = |lambda1| - beta1 - beta2^2/2 = " << rep.margin;
    rep.checks.push_back({"1", rep.margin > 0.0, detail.str()});
  }

  const bool growth_ok = problem.beta1 >= 0.0 && problem.beta2 >= 0.0 &&
                         problem.c0 >= 0.0 && problem.c1 >= 0.0 &&
                         problem.c2 >= 0.0;
  rep.checks.push_back({"growth-constants", growth_ok,
                        growth_ok ? "declared constants nonnegative"
                                  : "a declared constant is negative"});

  // Periodicity spot-check of f and g at 16 probe points.
  bool periodic_ok = true;
  std::ostringstream period_detail;
  std::mt19937_64 rng(0x9E0D1CULL);
  std::uniform_real_distribution<double> ux(-2.0, 2.0);
  Eigen::VectorXd x(problem.state_dim);
  Eigen::VectorXd f0(problem.state_dim), f1(problem.state_dim);
  Eigen::MatrixXd g0(problem.state_dim, problem.noise_dim);
  Eigen::MatrixXd g1(problem.state_dim, problem.noise_dim);
  for (int i = 0; i < kPeriodProbes; ++i) {
    const double t = problem.tau * double(i) / double(kPeriodProbes);
    for (int c = 0; c < problem.state_dim; ++c) x[c] = ux(rng);
    problem.drift(t, x, f0);
    problem.drift(t + problem.tau, x, f1);
    problem.diffusion(t, x, g0);
    problem.diffusion(t + problem.tau, x, g1);
    const double df = (f1 - f0).cwiseAbs().maxCoeff();
    const double dg = (g1 - g0).cwiseAbs().maxCoeff();
    if (df > kPeriodTol || dg > kPeriodTol) {
      periodic_ok = false;
      period_detail << "defect " << std::max(df, dg) << " at t=" << t << "; ";
    }
  }
  rep.checks.push_back({"periodicity", periodic_ok,
                        periodic_ok ? "f, g tau-periodic at probes"
                                    : period_detail.str()});

  rep.pass = true;
  for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
  return rep;
}

ConditionReport require_valid(const SdeProblem& problem) {
  ConditionReport rep = validate(problem);
  if (!rep.pass) {
    for (const auto& c : rep.checks) {
      if (!c.pass) throw ConditionError(c.name, "Condition (" + c.name + ") fails: " + c.detail);
    }
  }
  return rep;
}

InitialCondition InitialCondition::deterministic(Eigen::VectorXd v) {
  InitialCondition ic;
  ic.kind = Kind::Deterministic;
  ic.k_star_bound = v.norm();
  ic.value = std::move(v);
  return ic;
}

InitialCondition InitialCondition::sampled(
    std::function<Eigen::VectorXd(std::uint64_t)> s, double k_star) {
  InitialCondition ic;
  ic.kind = Kind::Sampled;
  ic.sampler = std::move(s);
  ic.k_star_bound = k_star;
  return ic;
}

Eigen::VectorXd InitialCondition::sample(std::uint64_t seed) const {
  if (kind == Kind::Deterministic) return value;
  return sampler(seed);
}

double InitialCondition::l2_norm_estimate(int n_samples,
                                          std::uint64_t base_seed) const {
  if (kind == Kind::Deterministic) return value.norm();
  double acc = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    acc += sampler(base_seed + std::uint64_t(i)).squaredNorm();
  }
  return std::sqrt(acc / double(n_samples));
}

GrowthProbeResult linear_growth_probe(const SdeProblem& problem,
                                      const Region& box, int n_probes,
                                      std::uint64_t seed) {
  if (box.lo.size() != problem.state_dim || box.hi.size() != problem.state_dim) {
    throw DomainError("linear_growth_probe: box dimension mismatch");
  }
  GrowthProbeResult result;
  std::mt19937_64 rng(mix_seed(seed ^ 0x6205BEULL));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Eigen::VectorXd x(problem.state_dim);
  Eigen::VectorXd fx(problem.state_dim);
  Eigen::MatrixXd gx(problem.state_dim, problem.noise_dim);
  for (int i = 0; i < n_probes; ++i) {
    const double t = problem.tau * u01(rng);
    for (int c = 0; c < problem.state_dim; ++c) {
      x[c] = box.lo[c] + (box.hi[c] - box.lo[c]) * u01(rng);
    }
    problem.drift(t, x, fx);
    problem.diffusion(t, x, gx);
    const double xn = x.norm();
    const double f_rhs = problem.beta1 * xn + problem.c1;
    const double g_rhs = problem.beta2 * xn + problem.c2;
    if (fx.norm() > f_rhs) {
      result.pass = false;
      result.violations.push_back({t, x, "f", fx.norm(), f_rhs});
    }
    if (gx.norm() > g_rhs) {
      result.pass = false;
      result.violations.push_back({t, x, "g", gx.norm(), g_rhs});
    }
  }
  return result;
}

SdeProblem make_example1() {
  return make_linear_scalar(-std::numbers::pi, 1.0, 1.0, 1, 2.0);
}

SdeProblem make_linear_scalar(double a, double c, double forcing_amplitude,
                              int forcing_harmonic, double tau) {
  SdeProblem p;
  p.state_dim = 1;
  p.noise_dim = 1;
  p.A = Eigen::MatrixXd::Constant(1, 1, a);
  const double omega = 2.0 * std::numbers::pi * double(forcing_harmonic) / tau;
  p.f = [forcing_amplitude, omega](double t, const Eigen::VectorXd&,
                                   Eigen::VectorXd& out) {
    out[0] = forcing_amplitude * std::sin(omega * t);
  };
  p.g = [c](double, const Eigen::VectorXd& x, Eigen::MatrixXd& out) {
    out(0, 0) = c * x[0];
  };
  p.tau = tau;
  p.beta1 = 0.0;
  p.beta2 = std::abs(c);
  p.c0 = std::abs(forcing_amplitude) * omega;  // |d forcing/dt| bound
  p.c1 = std::abs(forcing_amplitude);
  p.c2 = 0.0;
  p.holder_exponent = 1.0;  // forcing is C^1, so (1') holds as well
  p.milstein_ready = true;
  return p;
}

SdeProblem make_mathieu(double a0, double q, double c,
                        double forcing_amplitude, double tau) {
  SdeProblem p = make_linear_scalar(a0, c, forcing_amplitude, 1, tau);
  const double omega = 2.0 * std::numbers::pi / tau;
  p.A.resize(0, 0);
  p.a_of_t = [a0, q, omega](double t) {
    return Eigen::MatrixXd::Constant(1, 1, a0 + q * std::cos(omega * t));
  };
  return p;
}

SdeProblem make_rotation(double tau) {
  SdeProblem p;
  p.state_dim = 2;
  p.noise_dim = 1;
  const double omega = std::numbers::pi / (2.0 * tau);  // C^2 = rot(pi) = -I
  p.a_of_t = [omega](double) {
    Eigen::MatrixXd A(2, 2);
    A << 0.0, omega, -omega, 0.0;
    return A;
  };
  p.f = [](double, const Eigen::VectorXd&, Eigen::VectorXd& out) { out.setZero(); };
  p.g = [](double, const Eigen::VectorXd&, Eigen::MatrixXd& out) { out.setZero(); };
  p.tau = tau;
  return p;
}

}  // namespace rps

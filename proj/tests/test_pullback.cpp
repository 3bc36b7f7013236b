#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rps/model.hpp"
#include "rps/oracle.hpp"
#include "rps/pullback.hpp"

using namespace rps;

namespace {

std::vector<std::uint64_t> seeds_from(std::uint64_t base, int n) {
  std::vector<std::uint64_t> out;
  out.reserve(size_t(n));
  for (int i = 0; i < n; ++i) out.push_back(base + std::uint64_t(i));
  return out;
}

PathFactory window_factory(int noise_dim, double dt_fine, double t_min,
                           double t_max) {
  return [=](std::uint64_t seed) {
    return WienerPath::build(seed, noise_dim, dt_fine, 0.0, t_min, t_max);
  };
}

double periodic_ode_solution(double a, double t) {
  const double pi = std::numbers::pi;
  const double denom = pi * pi + a * a;
  return (-a / denom) * std::sin(pi * t) + (-pi / denom) * std::cos(pi * t);
}

}  // namespace

TEST_CASE("example1 converges at the paper's pull-back depth") {
  const SdeProblem p = make_example1();
  const ConditionReport rep = validate(p);
  const SchemeConfig scheme =
      make_scheme_config(SchemeKind::EulerMaruyama, 0.01, p, rep, 0.01);
  const InitialCondition xi =
      InitialCondition::deterministic(Eigen::VectorXd::Constant(1, 0.5));
  const PullbackResult res = pullback_rps(
      p, scheme, window_factory(1, 0.01, -6.0, 0.0), seeds_from(1, 400), 0.0,
      3, 1e-3, xi);
  CHECK(res.converged);
  CHECK(res.k_used == 3);
  REQUIRE(res.cauchy_gaps.size() == 2);
  CHECK(res.cauchy_gaps.back() < 1e-3);
  CHECK(res.cauchy_gaps[1] < res.cauchy_gaps[0]);
}

TEST_CASE("k_max without tolerance reports converged = false") {
  const SdeProblem p = make_example1();
  const ConditionReport rep = validate(p);
  const SchemeConfig scheme =
      make_scheme_config(SchemeKind::EulerMaruyama, 0.01, p, rep, 0.01);
  const InitialCondition xi =
      InitialCondition::deterministic(Eigen::VectorXd::Constant(1, 0.5));
  const PullbackResult res = pullback_rps(
      p, scheme, window_factory(1, 0.01, -8.0, 0.0), seeds_from(1, 50), 0.0,
      4, 0.0, xi);
  CHECK_FALSE(res.converged);
  CHECK(res.k_used == 4);
  CHECK(res.cauchy_gaps.size() == 3);
}

TEST_CASE("pure linear contraction: gaps decay by the exact factor") {
  SdeProblem p = make_example1();
  p.f = [](double, const Eigen::VectorXd&, Eigen::VectorXd& out) { out.setZero(); };
  p.g = [](double, const Eigen::VectorXd&, Eigen::MatrixXd& out) { out.setZero(); };
  p.beta2 = 0.0;
  const ConditionReport rep = validate(p);
  const double dt = 0.01;
  const SchemeConfig scheme = make_scheme_config(SchemeKind::EulerMaruyama, dt, p, rep, dt);
  const InitialCondition xi =
      InitialCondition::deterministic(Eigen::VectorXd::Constant(1, 2.0));
  const PullbackResult res = pullback_rps(
      p, scheme, window_factory(1, dt, -8.0, 0.0), seeds_from(1, 3), 0.0, 4,
      0.0, xi);
  REQUIRE(res.cauchy_gaps.size() == 3);
  const double factor =
      std::pow(1.0 - std::numbers::pi * dt, 2.0 / dt);  // (1 + a dt)^{tau/dt}
  CHECK(res.cauchy_gaps[1] / res.cauchy_gaps[0] == doctest::Approx(factor).epsilon(1e-10));
  CHECK(res.cauchy_gaps[2] / res.cauchy_gaps[1] == doctest::Approx(factor).epsilon(1e-10));
}

TEST_CASE("gap decay ratio obeys the dissipativity rate") {
  const SdeProblem p = make_example1();
  const ConditionReport rep = validate(p);
  const SchemeConfig scheme =
      make_scheme_config(SchemeKind::EulerMaruyama, 0.01, p, rep, 0.01);
  const InitialCondition xi =
      InitialCondition::deterministic(Eigen::VectorXd::Constant(1, 0.5));
  const PullbackResult res = pullback_rps(
      p, scheme, window_factory(1, 0.01, -8.0, 0.0), seeds_from(11, 300), 0.0,
      4, 0.0, xi);
  REQUIRE(res.cauchy_gaps.size() == 3);
  // e^{(beta1 + beta2^2/2 - |lambda1|) tau} with 20% slack.
  const double rate = std::exp((0.5 - std::numbers::pi) * 2.0);
  CHECK(res.fitted_gap_ratio() <= rate * 1.2);
}

TEST_CASE("pull-back limit is independent of the initial condition") {
  const SdeProblem p = make_example1();
  const ConditionReport rep = validate(p);
  const SchemeConfig scheme =
      make_scheme_config(SchemeKind::EulerMaruyama, 0.01, p, rep, 0.01);
  const auto seeds = seeds_from(21, 300);
  const auto factory = window_factory(1, 0.01, -6.0, 0.0);
  const double tol = 1e-3;
  const PullbackResult a = pullback_rps(
      p, scheme, factory, seeds, 0.0, 3, 0.0,
      InitialCondition::deterministic(Eigen::VectorXd::Constant(1, 0.5)));
  const PullbackResult b = pullback_rps(
      p, scheme, factory, seeds, 0.0, 3, 0.0,
      InitialCondition::deterministic(Eigen::VectorXd::Constant(1, -3.0)));
  const double rms =
      std::sqrt((a.values - b.values).squaredNorm() / double(seeds.size()));
  CHECK(rms < 2.0 * tol);
}

TEST_CASE("random periodicity: X*(r+tau, omega) vs X*(r, theta_tau omega)") {
  const SdeProblem p = make_example1();
  const ConditionReport rep = validate(p);
  const SchemeConfig scheme =
      make_scheme_config(SchemeKind::EulerMaruyama, 0.01, p, rep, 0.01);
  const InitialCondition xi =
      InitialCondition::deterministic(Eigen::VectorXd::Constant(1, 0.5));
  const auto seeds = seeds_from(31, 300);
  const double tol = 1e-3;

  // Window covers both the direct run to r + tau and the shifted lookups.
  const auto factory = window_factory(1, 0.01, -6.0, 2.0);
  const PullbackResult direct = pullback_rps(p, scheme, factory, seeds, 2.0,
                                             3, 0.0, xi);
  auto shifted_factory = [&](std::uint64_t seed) {
    return factory(seed).shift(200);  // theta_tau, tau / dt_fine = 200
  };
  const PullbackResult shifted = pullback_rps(p, scheme, shifted_factory,
                                              seeds, 0.0, 3, 0.0, xi);
  const double rms = std::sqrt((direct.values - shifted.values).squaredNorm() /
                               double(seeds.size()));
  CHECK(rms < 2.0 * tol);
}

TEST_CASE("semiflow composition is bitwise") {
  const SdeProblem p = make_example1();
  const ConditionReport rep = validate(p);
  const SchemeConfig scheme =
      make_scheme_config(SchemeKind::EulerMaruyama, 0.01, p, rep, 0.01);
  const WienerPath path = WienerPath::build(77, 1, 0.01, 0.0, -6.0, 1.5);
  const Eigen::VectorXd xi = Eigen::VectorXd::Constant(1, 0.5);

  const Eigen::VectorXd mid = integrate_terminal(p, scheme, path, -6.0, 0.0, xi);
  const Eigen::VectorXd two_leg = integrate_terminal(p, scheme, path, 0.0, 1.5, mid);
  const Eigen::VectorXd one_leg = integrate_terminal(p, scheme, path, -6.0, 1.5, xi);
  CHECK(two_leg == one_leg);
}

TEST_CASE("diagnostic series: deterministic case tracks the ODE orbit") {
  SdeProblem p = make_example1();
  p.g = [](double, const Eigen::VectorXd&, Eigen::MatrixXd& out) { out.setZero(); };
  p.beta2 = 0.0;
  const ConditionReport rep = validate(p);
  const double dt = 0.01;
  const SchemeConfig scheme = make_scheme_config(SchemeKind::EulerMaruyama, dt, p, rep, dt);
  const InitialCondition xi =
      InitialCondition::deterministic(Eigen::VectorXd::Constant(1, 0.5));

  std::vector<double> t_grid;
  for (int i = 0; i <= 20; ++i) t_grid.push_back(0.2 * double(i));
  const auto factory = window_factory(1, dt, -10.0, 0.0);
  const DiagnosticSeries series = periodicity_diagnostic(
      p, scheme, factory, seeds_from(1, 1), t_grid, -6.0, xi);

  // Deterministic periodic orbit: explicit Euler bias is O(dt), and the
  // series must be periodic to truncation accuracy.
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    CHECK(std::abs(series.values(0, Eigen::Index(j)) -
                   periodic_ode_solution(-std::numbers::pi, t_grid[j])) < 6e-3);
  }
  CHECK(series.periodicity_defect(2.0) < 1e-6);
}

TEST_CASE("diagnostic at t = 0 equals the plain pull-back value") {
  const SdeProblem p = make_example1();
  const ConditionReport rep = validate(p);
  const SchemeConfig scheme =
      make_scheme_config(SchemeKind::EulerMaruyama, 0.01, p, rep, 0.01);
  const InitialCondition xi =
      InitialCondition::deterministic(Eigen::VectorXd::Constant(1, 0.5));
  const auto factory = window_factory(1, 0.01, -6.0, 0.0);
  const DiagnosticSeries series = periodicity_diagnostic(
      p, scheme, factory, seeds_from(5, 3), {0.0}, -6.0, xi);
  const PullbackResult res =
      pullback_rps(p, scheme, factory, seeds_from(5, 3), 0.0, 3, 0.0, xi);
  for (int i = 0; i < 3; ++i) {
    CHECK(series.values(i, 0) == res.values(0, i));
  }
}

TEST_CASE("diagnostic shift outside the stored window errors") {
  const SdeProblem p = make_example1();
  const ConditionReport rep = validate(p);
  const SchemeConfig scheme =
      make_scheme_config(SchemeKind::EulerMaruyama, 0.01, p, rep, 0.01);
  const InitialCondition xi =
      InitialCondition::deterministic(Eigen::VectorXd::Constant(1, 0.5));
  const auto factory = window_factory(1, 0.01, -6.0, 0.0);  // too small for t=2
  CHECK_THROWS_AS(periodicity_diagnostic(p, scheme, factory, seeds_from(5, 1),
                                         {2.0}, -6.0, xi),
                  ExtentError);
}

TEST_CASE("shifted pair: cocycle identity for the linear multiplicative SDE") {
  SdeProblem p = make_example1();
  p.f = [](double, const Eigen::VectorXd&, Eigen::VectorXd& out) { out.setZero(); };
  const ConditionReport rep = validate(p);
  const double dt = 0.01;
  const SchemeConfig scheme = make_scheme_config(SchemeKind::EulerMaruyama, dt, p, rep, dt);
  const WienerPath path = WienerPath::build(41, 1, dt, 0.0, -8.0, 2.0);
  const InitialCondition xi =
      InitialCondition::deterministic(Eigen::VectorXd::Constant(1, 1.0));

  const ShiftedPair pair = shifted_pair(p, scheme, path, -6.0, -6.0, 2.0, xi);
  // shifted(t) = F * base(t - tau) with F the shifted run's first-period
  // multiplier; exact up to rounding, with matching increments.
  const std::size_t stride = 200;
  const double F = pair.shifted.states(0, Eigen::Index(stride)) /
                   pair.base.states(0, 0);
  for (std::size_t j = stride; j < pair.shifted.times.size(); j += 40) {
    const double lhs = pair.shifted.states(0, Eigen::Index(j));
    const double rhs = F * pair.base.states(0, Eigen::Index(j - stride));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
  }
}

TEST_CASE("shifted pair: example1 repeats with a one-period delay") {
  const SdeProblem p = make_example1();
  const ConditionReport rep = validate(p);
  const double dt = 0.01;
  const SchemeConfig scheme = make_scheme_config(SchemeKind::EulerMaruyama, dt, p, rep, dt);
  const WienerPath path = WienerPath::build(43, 1, dt, 0.0, -8.0, 2.0);
  const InitialCondition xi =
      InitialCondition::deterministic(Eigen::VectorXd::Constant(1, 0.5));
  const ShiftedPair pair = shifted_pair(p, scheme, path, -6.0, -2.0, 2.0, xi);
  CHECK(pair.max_shift_defect(2.0) < 1e-2);  // 10 * tol
}

TEST_CASE("double tau shift equals a single 2 tau shift") {
  const SdeProblem p = make_example1();
  const ConditionReport rep = validate(p);
  const double dt = 0.01;
  const SchemeConfig scheme = make_scheme_config(SchemeKind::EulerMaruyama, dt, p, rep, dt);
  const WienerPath path = WienerPath::build(47, 1, dt, 0.0, -10.0, 0.0);
  const Eigen::VectorXd xi = Eigen::VectorXd::Constant(1, 0.5);

  const WienerPath twice = path.shift(-200).shift(-200);
  const WienerPath once = path.shift(-400);
  const Eigen::VectorXd a = integrate_terminal(p, scheme, twice, -6.0, 0.0, xi);
  const Eigen::VectorXd b = integrate_terminal(p, scheme, once, -6.0, 0.0, xi);
  CHECK(a == b);
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rps/analysis.hpp"
#include "rps/model.hpp"
#include "rps/oracle.hpp"
#include "rps/schemes.hpp"

using namespace rps;

namespace {

// Unique periodic solution of x' = a x + sin(pi t) by undetermined
// coefficients: x = A sin(pi t) + B cos(pi t).
double periodic_ode_solution(double a, double t) {
  const double pi = std::numbers::pi;
  const double denom = pi * pi + a * a;
  const double A = -a / denom;
  const double B = -pi / denom;
  return A * std::sin(pi * t) + B * std::cos(pi * t);
}

}  // namespace

TEST_CASE("deterministic unforced flow is the exponential") {
  LinearScalarProblem p;
  p.a = -1.3;
  p.c = 0.0;
  p.tau = 2.0;
  const WienerPath path = WienerPath::build(1, 1, 0.01, 0.0, 0.0, 2.0);
  const double got = exact_flow(p, path, 0.0, 2.0, 0.7);
  CHECK(got == doctest::Approx(0.7 * std::exp(-1.3 * 2.0)).epsilon(1e-14));
}

TEST_CASE("unforced multiplicative flow is geometric Brownian motion") {
  LinearScalarProblem p;
  p.a = -std::numbers::pi;
  p.c = 1.0;
  p.tau = 2.0;
  const WienerPath path = WienerPath::build(2, 1, 0.001, 0.0, -1.0, 1.0);
  const double xi = 0.5;
  const double w1 = path.value_at(1.0)[0];
  const double w0 = path.value_at(-1.0)[0];
  const double expect =
      xi * std::exp((p.a - 0.5) * 2.0 + (w1 - w0));
  CHECK(exact_flow(p, path, -1.0, 1.0, xi) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("flow property: composition over an intermediate time") {
  const LinearScalarProblem p = oracle_example1();
  const WienerPath path = WienerPath::build(3, 1, 0.001, 0.0, -4.0, 2.0);
  const double xi = 0.5;
  const double mid = exact_flow(p, path, -4.0, -1.0, xi);
  const double full = exact_flow(p, path, -4.0, 2.0, xi);
  const double composed = exact_flow(p, path, -1.0, 2.0, mid);
  CHECK(composed == doctest::Approx(full).epsilon(1e-10));
}

TEST_CASE("exact_rps with zero forcing is zero") {
  LinearScalarProblem p = oracle_example1();
  p.forcing = nullptr;
  const WienerPath path = WienerPath::build(4, 1, 0.01, 0.0, -6.0, 0.0);
  const RpsValue v = exact_rps(p, path, 0.0, 6.0);
  CHECK(v.value == 0.0);
}

TEST_CASE("deterministic forced case matches the closed-form periodic orbit") {
  LinearScalarProblem p = oracle_example1();
  p.c = 0.0;  // x' = -pi x + sin(pi t)
  const double h = 1e-4;
  const WienerPath path = WienerPath::build(5, 1, h, 0.0, -12.0, 2.0);
  for (double t : {-1.0, 0.0, 0.5, 2.0}) {
    const RpsValue v = exact_rps(p, path, t, 12.0 + t);
    const double closed = periodic_ode_solution(p.a, t);
    // Trapezoid error O(h^2) plus the reported truncation tail.
    CHECK(std::abs(v.value - closed) <= 1e-6 + v.tail_bound);
  }
}

TEST_CASE("quadrature order: deterministic error shrinks by 4x when h halves") {
  LinearScalarProblem p = oracle_example1();
  p.c = 0.0;
  auto quad_err = [&](double h) {
    const WienerPath path = WienerPath::build(6, 1, h, 0.0, -12.0, 0.0);
    return std::abs(exact_rps(p, path, 0.0, 12.0).value -
                    periodic_ode_solution(p.a, 0.0));
  };
  const double e1 = quad_err(2e-3);
  const double e2 = quad_err(1e-3);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("stochastic quadrature error sits far below the study's RMSE floor") {
  // Subsampled (2h) trapezoid against the full grid on the same path;
  // a Richardson-style bound on the h-level quadrature error.
  const LinearScalarProblem p = oracle_example1();
  const double h = 2.5e-5;
  const WienerPath path = WienerPath::build(7, 1, h, 0.0, -6.0, 0.0);
  const double q_h = exact_rps(p, path, 0.0, 6.0).value;

  const double mu = p.a - 0.5;
  const std::int64_t n = 240000;
  double acc = 0.0;
  const double w_t = path.node_value(0);
  for (std::int64_t k = -n; k <= 0; k += 2) {
    const double s = double(k) * h;
    double term = std::exp(mu * (-s) + (w_t - path.node_value(k))) *
                  std::sin(std::numbers::pi * s);
    if (k == -n || k == 0) term *= 0.5;
    acc += term;
  }
  const double q_2h = acc * 2.0 * h;
  // err(h) ~ |q_h - q_2h| / 3; the smallest EM RMSE in the desk study is
  // around 1e-4, so demand two orders of magnitude of headroom.
  CHECK(std::abs(q_h - q_2h) / 3.0 < 1e-6);
}

TEST_CASE("random periodicity of the exact formula across a theta shift") {
  const LinearScalarProblem p = oracle_example1();
  const WienerPath path = WienerPath::build(8, 1, 1e-3, 0.0, -8.0, 2.0);
  const double direct = exact_rps(p, path, 2.0, 8.0).value;  // X*(t + tau, omega)
  const WienerPath shifted = path.shift(2000);               // theta_tau omega
  const double via_shift = exact_rps(p, shifted, 0.0, 8.0).value;  // X*(t, theta_tau omega)
  CHECK(direct == doctest::Approx(via_shift).epsilon(1e-12));
}

TEST_CASE("RPS is a fixed point of the exact flow") {
  const LinearScalarProblem p = oracle_example1();
  const WienerPath path = WienerPath::build(9, 1, 1e-3, 0.0, -8.0, 1.0);
  const double t0 = 0.0, t1 = 1.0;
  const double rps0 = exact_rps(p, path, t0, 8.0).value;
  const double rps1 = exact_rps(p, path, t1, 9.0).value;  // same lower limit
  const double flowed = exact_flow(p, path, t0, t1, rps0);
  CHECK(flowed == doctest::Approx(rps1).epsilon(1e-10));
}

TEST_CASE("doubling the truncation moves the value less than the tail bound") {
  const LinearScalarProblem p = oracle_example1();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const WienerPath path = WienerPath::build(seed, 1, 1e-3, 0.0, -8.0, 0.0);
    const RpsValue a = exact_rps(p, path, 0.0, 4.0);
    const RpsValue b = exact_rps(p, path, 0.0, 8.0);
    CHECK(std::abs(a.value - b.value) <= a.tail_bound);
    CHECK(b.tail_bound < a.tail_bound);
  }
}

TEST_CASE("EM against the exact flow shows the strong 1/2 order") {
  const SdeProblem sde = make_example1();
  const LinearScalarProblem p = oracle_example1();
  const ConditionReport rep = validate(sde);
  const double dt_fine = 1e-3;
  const int n_seeds = 200;
  const Eigen::VectorXd xi = Eigen::VectorXd::Constant(1, 0.5);

  ErrorTable table;
  for (double dt : {1e-3, 2e-3, 4e-3}) {
    const SchemeConfig scheme =
        make_scheme_config(SchemeKind::EulerMaruyama, dt, sde, rep, dt_fine);
    double sum_sq = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
      const WienerPath path =
          WienerPath::build(100 + std::uint64_t(s), 1, dt_fine, 0.0, -6.0, 0.0);
      const double em = integrate_terminal(sde, scheme, path, -6.0, 0.0, xi)[0];
      const double exact = exact_flow(p, path, -6.0, 0.0, xi[0]);
      sum_sq += (em - exact) * (em - exact);
    }
    table.rows.push_back({dt, std::sqrt(sum_sq / n_seeds), n_seeds, 0.0});
  }
  const OrderFit fit = fit_order(table);
  CHECK(fit.slope == doctest::Approx(0.5).epsilon(0.35));
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rps/model.hpp"

using namespace rps;

TEST_CASE("example1 constants pass validation with the known margin") {
  const SdeProblem p = make_example1();
  const ConditionReport rep = validate(p);
  CHECK(rep.pass);
  CHECK(rep.lambda1 == doctest::Approx(-std::numbers::pi));
  CHECK(rep.lambda_m == doctest::Approx(-std::numbers::pi));
  CHECK(rep.margin == doctest::Approx(std::numbers::pi - 0.5));
  CHECK(rep.margin == doctest::Approx(2.6416).epsilon(1e-4));
  CHECK(rep.dt_max == doctest::Approx(1.0 / std::numbers::pi));
  CHECK(rep.rho * rep.dt_max == 1.0);
}

TEST_CASE("positive eigenvalue violates Condition (A)") {
  SdeProblem p = make_linear_scalar(1.0, 0.5, 1.0, 1, 2.0);
  CHECK_THROWS_AS(validate(p), ConditionError);
  try {
    validate(p);
  } catch (const ConditionError& e) {
    CHECK(e.condition == "A");
  }
}

TEST_CASE("non-symmetric A violates Condition (A)") {
  SdeProblem p = make_example1();
  p.state_dim = 2;
  p.noise_dim = 1;
  p.A.resize(2, 2);
  p.A << -1.0, 0.5, -0.5, -1.0;
  p.f = [](double, const Eigen::VectorXd&, Eigen::VectorXd& out) { out.setZero(); };
  p.g = [](double, const Eigen::VectorXd&, Eigen::MatrixXd& out) { out.setZero(); };
  CHECK_THROWS_AS(validate(p), ConditionError);
}

TEST_CASE("insufficient margin is reported, not thrown") {
  // beta1 = 1, beta2 = 2, lambda1 = -2.9: margin = 2.9 - 3 = -0.1.
  SdeProblem p = make_linear_scalar(-2.9, 2.0, 1.0, 1, 2.0);
  p.beta1 = 1.0;
  const ConditionReport rep = validate(p);
  CHECK_FALSE(rep.pass);
  CHECK(rep.margin == doctest::Approx(-0.1));
  CHECK_THROWS_AS(require_valid(p), ConditionError);
}

TEST_CASE("alpha sits strictly between the Lipschitz load and |lambda1|") {
  const SdeProblem p = make_example1();
  const ConditionReport rep = validate(p);
  const double load = p.beta1 + 0.5 * p.beta2 * p.beta2;
  CHECK(rep.alpha - load == doctest::Approx(rep.margin / 2.0));
  CHECK(std::abs(rep.lambda1) - rep.alpha == doctest::Approx(rep.margin / 2.0));
}

TEST_CASE("validate is pure") {
  const SdeProblem p = make_example1();
  const ConditionReport a = validate(p);
  const ConditionReport b = validate(p);
  CHECK(a.lambda1 == b.lambda1);
  CHECK(a.margin == b.margin);
  CHECK(a.alpha == b.alpha);
  CHECK(a.pass == b.pass);
}

TEST_CASE("periodicity probe catches a wrong tau") {
  SdeProblem p = make_example1();
  p.tau = 1.9;  // sin(pi t) is not 1.9-periodic
  const ConditionReport rep = validate(p);
  CHECK_FALSE(rep.pass);
  bool found = false;
  for (const auto& c : rep.checks) {
    if (c.name == "periodicity") {
      found = true;
      CHECK_FALSE(c.pass);
    }
  }
  CHECK(found);
}

TEST_CASE("linear growth probe on example1") {
  const SdeProblem p = make_example1();  // C1 = 1, C2 = 0
  Region box;
  box.lo = Eigen::VectorXd::Constant(1, -10.0);
  box.hi = Eigen::VectorXd::Constant(1, 10.0);
  const GrowthProbeResult res = linear_growth_probe(p, box, 512);
  CHECK(res.pass);
  CHECK(res.violations.empty());
}

TEST_CASE("quadratic drift fails the linear growth probe beyond |x| = 2") {
  SdeProblem p = make_example1();
  p.f = [](double, const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    out[0] = x[0] * x[0];
  };
  p.beta1 = 1.0;
  p.c1 = 1.0;
  Region box;
  box.lo = Eigen::VectorXd::Constant(1, -10.0);
  box.hi = Eigen::VectorXd::Constant(1, 10.0);
  const GrowthProbeResult res = linear_growth_probe(p, box, 512);
  CHECK_FALSE(res.pass);
  // x^2 > |x| + 1 exactly when |x| exceeds the golden ratio.
  const double boundary = 0.5 * (1.0 + std::sqrt(5.0));
  bool beyond_two = false;
  for (const auto& v : res.violations) {
    if (v.which == "f") {
      CHECK(std::abs(v.x[0]) > boundary);
      if (std::abs(v.x[0]) > 2.0) beyond_two = true;
    }
  }
  CHECK(beyond_two);
}

TEST_CASE("randomized probes agree with a dense-grid check") {
  SdeProblem p = make_example1();
  p.f = [](double, const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    out[0] = 0.3 * x[0] + 2.0 * std::sin(x[0]);
  };
  p.beta1 = 0.5;
  p.c1 = 1.0;
  Region box;
  box.lo = Eigen::VectorXd::Constant(1, -8.0);
  box.hi = Eigen::VectorXd::Constant(1, 8.0);

  // Dense-grid oracle over the same box.
  bool dense_pass = true;
  Eigen::VectorXd x(1), fx(1);
  for (int i = 0; i <= 4000; ++i) {
    x[0] = -8.0 + 16.0 * double(i) / 4000.0;
    p.drift(0.0, x, fx);
    if (std::abs(fx[0]) > 0.5 * std::abs(x[0]) + 1.0) dense_pass = false;
  }
  const GrowthProbeResult res = linear_growth_probe(p, box, 4096);
  CHECK(res.pass == dense_pass);
}

TEST_CASE("initial conditions: L2 bound check") {
  const InitialCondition det =
      InitialCondition::deterministic(Eigen::VectorXd::Constant(1, 0.5));
  CHECK(det.l2_norm_estimate(10) == doctest::Approx(0.5));
  CHECK(det.sample(99)[0] == 0.5);

  const InitialCondition sampled = InitialCondition::sampled(
      [](std::uint64_t seed) {
        return Eigen::VectorXd::Constant(1, seed % 2 == 0 ? 1.0 : -1.0);
      },
      1.5);
  const double est = sampled.l2_norm_estimate(1000);
  CHECK(est == doctest::Approx(1.0));
  CHECK(est <= sampled.k_star_bound);
}

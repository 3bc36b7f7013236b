#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rps/errors.hpp"

namespace rps {

// Drift and diffusion write into caller-owned buffers so the integrators
// stay allocation-free. Both must be pure functions of (t, x).
using DriftFn =
    std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;
using DiffusionFn =
    std::function<void(double, const Eigen::VectorXd&, Eigen::MatrixXd&)>;
using MatrixFn = std::function<Eigen::MatrixXd(double)>;

// An SDE  dX = [A X + f(t,X)] dt + g(t,X) dW  with tau-periodic f, g, or
// the periodic-linear-part variant dX = [A(t) X + f dt + ...] when
// `a_of_t` is set. Lipschitz/growth constants are declared by the caller
// and probe-checked, not estimated.
struct SdeProblem {
  int state_dim = 1;
  int noise_dim = 1;
  Eigen::MatrixXd A;   // constant linear part (ignored when a_of_t set)
  MatrixFn a_of_t;     // periodic linear part, empty for the constant form
  DriftFn f;
  DiffusionFn g;
  double tau = 1.0;
  double beta1 = 0.0;          // Lipschitz constant of f in x
  double beta2 = 0.0;          // Lipschitz constant of g in x
  double c0 = 0.0;             // Hoelder-in-t constant (both f and g)
  double c0_g = -1.0;          // optional per-function override, <0 = use c0
  double c1 = 0.0;             // linear-growth offset of f
  double c2 = 0.0;             // linear-growth offset of g
  double holder_exponent = 0.5;  // 0.5 for Condition (1), 1.0 for (1')
  bool milstein_ready = false;   // bounded first x-derivatives of f and g

  bool has_time_varying_A() const { return bool(a_of_t); }

  void drift(double t, const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
    f(t, x, out);
  }
  void diffusion(double t, const Eigen::VectorXd& x, Eigen::MatrixXd& out) const {
    g(t, x, out);
  }
};

struct ConditionCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Quantitative consequences of Conditions (A) and (1): extreme
// eigenvalues, the step bound dt_max = 1/rho, the dissipativity margin
// and the stability parameter alpha.
struct ConditionReport {
  double lambda1 = 0.0;   // largest eigenvalue of A (closest to zero)
  double lambda_m = 0.0;  // smallest eigenvalue
  double rho = 0.0;       // |lambda_m|
  double dt_max = 0.0;    // 1/rho
  double margin = 0.0;    // |lambda1| - beta1 - beta2^2/2
  double alpha = 0.0;     // midpoint of (beta1 + beta2^2/2, |lambda1|)
  std::vector<ConditionCheck> checks;
  bool pass = false;
};

// Checks Conditions (A) and (1) plus periodicity probes. Structural
// violations of Condition (A) (non-symmetric A, a nonnegative eigenvalue)
// throw ConditionError("A"); a nonpositive dissipativity margin is
// reported as a failing check, with the arithmetic left visible.
ConditionReport validate(const SdeProblem& problem);

// Like validate() but also throws ConditionError("1") when the margin
// check fails; used by drivers that must not start a hopeless run.
ConditionReport require_valid(const SdeProblem& problem);

// Initial state: a fixed vector or a per-seed sampler, with the declared
// L2 bound K* of Condition (2).
struct InitialCondition {
  enum class Kind { Deterministic, Sampled };
  Kind kind = Kind::Deterministic;
  Eigen::VectorXd value;
  std::function<Eigen::VectorXd(std::uint64_t)> sampler;
  double k_star_bound = 0.0;

  static InitialCondition deterministic(Eigen::VectorXd v);
  static InitialCondition sampled(std::function<Eigen::VectorXd(std::uint64_t)> s,
                                  double k_star);
  Eigen::VectorXd sample(std::uint64_t seed) const;
  // Monte Carlo estimate of ||xi||_2 (exact for the deterministic kind).
  double l2_norm_estimate(int n_samples, std::uint64_t base_seed = 0) const;
};

struct Region {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

struct GrowthViolation {
  double t;
  Eigen::VectorXd x;
  std::string which;  // "f" or "g"
  double lhs, rhs;
};

struct GrowthProbeResult {
  bool pass = true;
  std::vector<GrowthViolation> violations;
};

// Spot-checks |f(t,x)| <= beta1|x| + C1 and |g(t,x)|_F <= beta2|x| + C2
// at seeded random probes in `box` x [0, tau). Report-only.
GrowthProbeResult linear_growth_probe(const SdeProblem& problem,
                                      const Region& box, int n_probes,
                                      std::uint64_t seed = 0);

// Builtin problems exposed through the CLI config.
//
// dX = -pi X dt + sin(pi t) dt + X dW, tau = 2.
SdeProblem make_example1();
// Scalar dX = a X dt + amp*sin(harmonic*2*pi*t/tau) dt + c X dW.
SdeProblem make_linear_scalar(double a, double c, double forcing_amplitude,
                              int forcing_harmonic, double tau);
// Scalar periodic linear part a(t) = a0 + q cos(2 pi t / tau) with the
// same forcing and multiplicative noise structure.
SdeProblem make_mathieu(double a0, double q, double c,
                        double forcing_amplitude, double tau);
// 2x2 rotation generator; its monodromy squares to -I, which makes the
// Lyapunov-Floquet logarithm fail on purpose.
SdeProblem make_rotation(double tau);

}  // namespace rps

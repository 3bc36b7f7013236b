#include "rps/oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace rps {

namespace {

// Trapezoid sum of exp(mu*(t - s) + c*(W_t - W_s)) * forcing(s) over the
// fine grid of [lo, t]. Works on node indices relative to the view anchor.
double damped_forcing_integral(const LinearScalarProblem& problem,
                               const WienerPath& path, std::int64_t k_lo,
                               std::int64_t k_hi) {
  const double mu = problem.a - 0.5 * problem.c * problem.c;
  const double h = path.dt_fine();
  const double w_t = path.node_value(k_hi);
  const double anchor = path.anchor();

  double acc = 0.0;
  for (std::int64_t k = k_lo; k <= k_hi; ++k) {
    const double s = anchor + double(k) * h;
    const double exponent = mu * (double(k_hi - k) * h) +
                            problem.c * (w_t - path.node_value(k));
    double term = std::exp(exponent) * problem.forcing(s);
    if (k == k_lo || k == k_hi) term *= 0.5;
    acc += term;
  }
  return acc * h;
}

}  // namespace

double exact_flow(const LinearScalarProblem& problem, const WienerPath& path,
                  double t0, double t, double xi) {
  if (t < t0) throw DomainError("exact_flow: t < t0");
  const std::int64_t k0 = path.steps_from_anchor(t0);
  const std::int64_t k1 = path.steps_from_anchor(t);
  const double mu = problem.a - 0.5 * problem.c * problem.c;
  const double h = path.dt_fine();
  const double phi = std::exp(mu * (double(k1 - k0) * h) +
                              problem.c * (path.node_value(k1) - path.node_value(k0)));
  double value = phi * xi;
  if (problem.forcing) value += damped_forcing_integral(problem, path, k0, k1);
  return value;
}

RpsValue exact_rps(const LinearScalarProblem& problem, const WienerPath& path,
                   double t, double truncation_T, double bias_margin) {
  if (truncation_T <= 0.0) throw DomainError("exact_rps: truncation_T must be positive");
  const std::int64_t k_hi = path.steps_from_anchor(t);
  const std::int64_t span = to_steps(truncation_T, path.dt_fine(), "exact_rps truncation");
  const std::int64_t k_lo = k_hi - span;
  if (k_lo < -path.n_left()) {
    throw ExtentError("exact_rps: truncation window leaves the path extent");
  }

  RpsValue out;
  double sup_forcing = 0.0;
  if (problem.forcing) {
    out.value = damped_forcing_integral(problem, path, k_lo, k_hi);
    // Crude sup bound from a scan over one period.
    for (int i = 0; i <= 64; ++i) {
      sup_forcing = std::max(sup_forcing,
                             std::abs(problem.forcing(problem.tau * i / 64.0)));
    }
  }
  const double rate =
      problem.a - 0.5 * problem.c * problem.c + problem.c * problem.c * bias_margin;
  if (rate < 0.0) {
    out.tail_bound = sup_forcing * std::exp(rate * truncation_T) / std::abs(rate);
  } else {
    out.tail_bound = std::numeric_limits<double>::infinity();
  }
  return out;
}

LinearScalarProblem oracle_for_linear(double a, double c,
                                      double forcing_amplitude,
                                      int forcing_harmonic, double tau) {
  LinearScalarProblem p;
  p.a = a;
  p.c = c;
  p.tau = tau;
  const double omega = 2.0 * std::numbers::pi * double(forcing_harmonic) / tau;
  p.forcing = [forcing_amplitude, omega](double t) {
    return forcing_amplitude * std::sin(omega * t);
  };
  return p;
}

LinearScalarProblem oracle_example1() {
  return oracle_for_linear(-std::numbers::pi, 1.0, 1.0, 1, 2.0);
}

}  // namespace rps

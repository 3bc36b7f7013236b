#pragma once

#include <functional>

#include "rps/wiener.hpp"

namespace rps {

// Scalar linear benchmark  dX = a X dt + forcing(t) dt + c X dW  with
// closed-form flow; the ground truth for the error studies.
struct LinearScalarProblem {
  double a = -1.0;
  double c = 0.0;
  std::function<double(double)> forcing;
  double tau = 1.0;

  // a + c^2/2 < 0, the specialised dissipativity condition.
  bool dissipative() const { return a + 0.5 * c * c < 0.0; }
};

// Exact flow from (t0, xi) to t on the stored path, via the variation-of-
// constants formula with the propagator
//   Phi(t, s) = exp((a - c^2/2)(t - s) + c (W_t - W_s)).
// The forcing integral uses trapezoid quadrature on the fine grid; every
// integrand term carries the full damping exponent (t - s) so nothing
// large is ever formed.
double exact_flow(const LinearScalarProblem& problem, const WienerPath& path,
                  double t0, double t, double xi);

struct RpsValue {
  double value = 0.0;
  // Expectation-level bound on the discarded tail of the infinite-horizon
  // integral: sup|forcing| * exp(rate*T) / |rate| with
  // rate = a - c^2/2 + c^2 * bias_margin.
  double tail_bound = 0.0;
};

// The exact random periodic value at time t,
//   X*_t = int_{-inf}^t exp((a - c^2/2)(t-s) + c(W_t - W_s)) forcing(s) ds,
// truncated at t - truncation_T and evaluated by trapezoid quadrature on
// the fine grid.
RpsValue exact_rps(const LinearScalarProblem& problem, const WienerPath& path,
                   double t, double truncation_T, double bias_margin = 0.5);

// The oracle counterpart of a builtin linear problem (same a, c, forcing).
LinearScalarProblem oracle_for_linear(double a, double c,
                                      double forcing_amplitude,
                                      int forcing_harmonic, double tau);
LinearScalarProblem oracle_example1();

}  // namespace rps

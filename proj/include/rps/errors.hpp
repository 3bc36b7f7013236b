#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rps {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A time does not land on the fine (or coarse) grid, or grid spans are
// not integral multiples of the step.
struct GridAlignmentError : Error {
  using Error::Error;
};

// Invalid argument values (non-positive steps, empty samples, dimension
// mismatches).
struct DomainError : Error {
  using Error::Error;
};

// A shift or window request falls outside the stored path extent.
struct ExtentError : Error {
  using Error::Error;
};

// A standing condition on the SDE problem fails. `condition` names it
// ("A", "1", "A'", "1'", "2").
struct ConditionError : Error {
  ConditionError(std::string which, const std::string& what)
      : Error(what), condition(std::move(which)) {}
  std::string condition;
};

// A scheme produced a non-finite state. Step index and time refer to the
// failing step; seed is filled in by ensemble drivers.
struct DivergenceError : Error {
  DivergenceError(const std::string& what, std::int64_t step = -1,
                  double time = 0.0, std::uint64_t seed = 0)
      : Error(what), step_index(step), t(time), seed(seed) {}
  std::int64_t step_index;
  double t;
  std::uint64_t seed;
};

// Order fit attempted on degenerate data (zero RMSE rows).
struct DegenerateFitError : Error {
  using Error::Error;
};

// A matrix that is invertible in theory came out numerically singular;
// signals an upstream integration failure.
struct NumericalRankError : Error {
  using Error::Error;
};

// The squared monodromy matrix has an eigenvalue on the closed negative
// real axis, so the principal real logarithm does not exist.
struct LogarithmExistenceError : Error {
  LogarithmExistenceError(const std::string& what, std::complex<double> ev)
      : Error(what), eigenvalue(ev) {}
  std::complex<double> eigenvalue;
};

}  // namespace rps

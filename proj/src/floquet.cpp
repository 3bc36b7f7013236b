#include "rps/floquet.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "rps/wiener.hpp"

namespace rps {

namespace {

constexpr double kLogResidualTol = 1e-10;

std::int64_t node_of(double t, double h, double two_tau, bool* exact) {
  double s = std::fmod(t, two_tau);
  if (s < 0.0) s += two_tau;
  const double q = s / h;
  const double k = std::round(q);
  *exact = std::abs(q - k) <= 1e-9 * std::max(1.0, std::abs(q));
  return std::int64_t(k);
}

Eigen::MatrixXd cubic_lookup(const std::vector<Eigen::MatrixXd>& grid,
                             double t, double h, double two_tau) {
  // Catmull-Rom through the four surrounding nodes, wrapping periodically.
  double s = std::fmod(t, two_tau);
  if (s < 0.0) s += two_tau;
  const std::int64_t n = std::int64_t(grid.size()) - 1;  // grid[n] == grid[0] point 2*tau
  const std::int64_t k1 = std::int64_t(std::floor(s / h));
  const double u = s / h - double(k1);
  auto wrap = [n](std::int64_t k) { return size_t(((k % n) + n) % n); };
  const Eigen::MatrixXd& p0 = grid[wrap(k1 - 1)];
  const Eigen::MatrixXd& p1 = grid[wrap(k1)];
  const Eigen::MatrixXd& p2 = grid[wrap(k1 + 1)];
  const Eigen::MatrixXd& p3 = grid[wrap(k1 + 2)];
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * u +
                (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u * u +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u * u * u);
}

}  // namespace

Eigen::MatrixXd FloquetData::S_at(double t) const {
  bool exact = false;
  const std::int64_t k = node_of(t, h, 2.0 * tau, &exact);
  if (exact) return s_grid[size_t(k) % (s_grid.size() - 1)];
  return cubic_lookup(s_grid, t, h, 2.0 * tau);
}

Eigen::MatrixXd FloquetData::S_inv_at(double t) const {
  bool exact = false;
  const std::int64_t k = node_of(t, h, 2.0 * tau, &exact);
  if (exact) return s_inv_grid[size_t(k) % (s_inv_grid.size() - 1)];
  return cubic_lookup(s_inv_grid, t, h, 2.0 * tau);
}

std::vector<Eigen::MatrixXd> fundamental_matrix(const MatrixFn& a_of_t,
                                                double tau, double h) {
  if (!(tau > 0.0) || !(h > 0.0)) {
    throw DomainError("fundamental_matrix: tau and h must be positive");
  }
  const std::int64_t n = to_steps(2.0 * tau, h, "fundamental_matrix: 2*tau/h");

  // Periodicity probe on A(t).
  for (int i = 0; i < 8; ++i) {
    const double t = tau * double(i) / 8.0;
    const double defect = (a_of_t(t + tau) - a_of_t(t)).cwiseAbs().maxCoeff();
    if (defect > 1e-10) {
      std::ostringstream msg;
      msg << "fundamental_matrix: A(t) is not tau-periodic (defect " << defect
          << " at t=" << t << ")";
      throw DomainError(msg.str());
    }
  }

  const Eigen::Index m = a_of_t(0.0).rows();
  std::vector<Eigen::MatrixXd> grid;
  grid.reserve(size_t(n) + 1);
  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(m, m);
  grid.push_back(phi);
  for (std::int64_t i = 0; i < n; ++i) {
    const double t = double(i) * h;
    const Eigen::MatrixXd k1 = a_of_t(t) * phi;
    const Eigen::MatrixXd k2 = a_of_t(t + 0.5 * h) * (phi + 0.5 * h * k1);
    const Eigen::MatrixXd k3 = a_of_t(t + 0.5 * h) * (phi + 0.5 * h * k2);
    const Eigen::MatrixXd k4 = a_of_t(t + h) * (phi + h * k3);
    phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    grid.push_back(phi);
  }
  return grid;
}

Eigen::MatrixXd monodromy(const std::vector<Eigen::MatrixXd>& phi_grid,
                          double tau, double h) {
  const std::int64_t k = to_steps(tau, h, "monodromy: tau/h");
  if (k < 0 || size_t(k) >= phi_grid.size()) {
    throw DomainError("monodromy: grid does not cover tau");
  }
  const Eigen::MatrixXd& C = phi_grid[size_t(k)];
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
  if (!lu.isInvertible()) {
    throw NumericalRankError(
        "monodromy: Phi(tau) is numerically singular; the fundamental-matrix "
        "integration failed");
  }
  return C;
}

Eigen::MatrixXd real_log_B(const Eigen::MatrixXd& C, double tau) {
  const Eigen::MatrixXd C2 = C * C;
  const Eigen::EigenSolver<Eigen::MatrixXd> es(C2);
  const double scale = std::max(1.0, C2.norm());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const std::complex<double> ev = es.eigenvalues()[i];
    if (std::abs(ev.imag()) <= 1e-12 * scale && ev.real() <= 1e-12 * scale) {
      std::ostringstream msg;
      msg << "real_log_B: eigenvalue " << ev.real()
          << " of C^2 lies on the closed negative real axis; no principal "
             "real logarithm";
      throw LogarithmExistenceError(msg.str(), ev);
    }
  }
  const Eigen::MatrixXd B = C2.log() / (2.0 * tau);
  const double residual = ((2.0 * tau * B).exp() - C2).norm() / C2.norm();
  if (residual > kLogResidualTol) {
    std::ostringstream msg;
    msg << "real_log_B: residual |exp(2 B tau) - C^2| / |C^2| = " << residual
        << " exceeds " << kLogResidualTol;
    throw NumericalRankError(msg.str());
  }
  return B;
}

FloquetData build_floquet(const MatrixFn& a_of_t, double tau, double h) {
  FloquetData data;
  data.tau = tau;
  data.h = h;
  data.phi_grid = fundamental_matrix(a_of_t, tau, h);
  data.C = monodromy(data.phi_grid, tau, h);
  data.B = real_log_B(data.C, tau);
  data.log_residual =
      ((2.0 * tau * data.B).exp() - data.C * data.C).norm() /
      (data.C * data.C).norm();

  data.s_grid.reserve(data.phi_grid.size());
  data.s_inv_grid.reserve(data.phi_grid.size());
  double max_s = 0.0, max_s_inv = 0.0;
  for (std::size_t j = 0; j < data.phi_grid.size(); ++j) {
    const double t = double(j) * h;
    const Eigen::MatrixXd s = data.phi_grid[j] * (-t * data.B).exp();
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
    if (!lu.isInvertible()) {
      throw NumericalRankError("build_floquet: S(t) numerically singular");
    }
    data.s_grid.push_back(s);
    data.s_inv_grid.push_back(lu.inverse());
    max_s = std::max(max_s, s.norm());
    max_s_inv = std::max(max_s_inv, data.s_inv_grid.back().norm());
  }
  data.gamma = max_s * max_s_inv;
  return data;
}

Eigen::VectorXd LfTransformed::map_initial(const Eigen::VectorXd& xi,
                                           double t0) const {
  return data->S_inv_at(t0) * xi;
}

LfTransformed lf_transform(const SdeProblem& periodic_problem,
                           std::shared_ptr<const FloquetData> data) {
  if (!periodic_problem.has_time_varying_A()) {
    throw DomainError("lf_transform: problem has a constant linear part");
  }
  const Eigen::MatrixXd& B = data->B;
  const double asym = (B - B.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    std::ostringstream msg;
    msg << "Condition (A'): B is not symmetric, max |B - B^T| = " << asym;
    throw ConditionError("A'", msg.str());
  }

  LfTransformed out;
  out.data = data;
  SdeProblem& p = out.problem;
  p.state_dim = periodic_problem.state_dim;
  p.noise_dim = periodic_problem.noise_dim;
  p.A = B;
  p.tau = 2.0 * periodic_problem.tau;  // the reduced system is 2*tau-periodic
  p.beta1 = periodic_problem.beta1 * data->gamma;
  p.beta2 = periodic_problem.beta2 * data->gamma;
  p.c0 = periodic_problem.c0 * data->gamma;
  p.c1 = periodic_problem.c1 * data->gamma;
  p.c2 = periodic_problem.c2 * data->gamma;
  p.holder_exponent = periodic_problem.holder_exponent;
  p.milstein_ready = periodic_problem.milstein_ready;

  const SdeProblem base = periodic_problem;  // value copy keeps f, g alive
  auto shared = data;
  p.f = [base, shared](double t, const Eigen::VectorXd& z, Eigen::VectorXd& out_v) {
    const Eigen::MatrixXd s = shared->S_at(t);
    Eigen::VectorXd fx(base.state_dim);
    base.drift(t, s * z, fx);
    out_v.noalias() = shared->S_inv_at(t) * fx;
  };
  p.g = [base, shared](double t, const Eigen::VectorXd& z, Eigen::MatrixXd& out_m) {
    const Eigen::MatrixXd s = shared->S_at(t);
    Eigen::MatrixXd gx(base.state_dim, base.noise_dim);
    base.diffusion(t, s * z, gx);
    out_m.noalias() = shared->S_inv_at(t) * gx;
  };

  const ConditionReport rep = validate(p);
  if (!rep.pass) {
    std::ostringstream msg;
    msg << "Condition (1'): gamma-inflated margin fails, |lambda1(B)| - "
           "beta1*gamma - (beta2*gamma)^2/2 = "
        << rep.margin;
    throw ConditionError("1'", msg.str());
  }
  return out;
}

Trajectory map_back(const FloquetData& data, const Trajectory& z_trajectory) {
  Trajectory out;
  out.times = z_trajectory.times;
  out.scheme = z_trajectory.scheme;
  out.seed = z_trajectory.seed;
  out.states.resizeLike(z_trajectory.states);
  const double two_tau = 2.0 * data.tau;
  for (std::size_t j = 0; j < out.times.size(); ++j) {
    bool exact = false;
    node_of(out.times[j], data.h, two_tau, &exact);
    if (!exact && j + 1 != out.times.size()) {
      std::ostringstream msg;
      msg << "map_back: interior node t=" << out.times[j]
          << " does not sit on the S grid";
      throw GridAlignmentError(msg.str());
    }
    out.states.col(Eigen::Index(j)) =
        data.S_at(out.times[j]) * z_trajectory.states.col(Eigen::Index(j));
  }
  return out;
}

}  // namespace rps

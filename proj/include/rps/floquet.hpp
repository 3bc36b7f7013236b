#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "rps/model.hpp"
#include "rps/schemes.hpp"

namespace rps {

// Lyapunov-Floquet reduction data for dx = A(t) x: the fundamental matrix
// Phi on a grid over [0, 2*tau], the monodromy C = Phi(tau), the real
// matrix B with exp(2*B*tau) = C^2, and the transformation S(t) =
// Phi(t) exp(-B t) with its inverses. S is real and 2*tau-periodic.
struct FloquetData {
  double tau = 0.0;
  double h = 0.0;  // grid step; the grid covers [0, 2*tau]
  std::vector<Eigen::MatrixXd> phi_grid;
  Eigen::MatrixXd C;
  Eigen::MatrixXd B;
  std::vector<Eigen::MatrixXd> s_grid;
  std::vector<Eigen::MatrixXd> s_inv_grid;
  double gamma = 0.0;         // (max_t |S|) * (max_t |S^-1|), Frobenius
  double log_residual = 0.0;  // |exp(2 B tau) - C^2|_F / |C^2|_F

  // 2*tau-periodic lookup; exact on grid nodes, cubic (Catmull-Rom)
  // between them for the off-grid partial-step time.
  Eigen::MatrixXd S_at(double t) const;
  Eigen::MatrixXd S_inv_at(double t) const;
};

// Classical fourth-order one-step integration of Phi' = A(t) Phi from
// Phi(0) = I over [0, 2*tau]; h must divide 2*tau. A(t) is probe-checked
// for tau-periodicity.
std::vector<Eigen::MatrixXd> fundamental_matrix(const MatrixFn& a_of_t,
                                                double tau, double h);

// C = Phi(tau) (Phi(0) = I by construction). Throws NumericalRankError if
// the integration produced a numerically singular period map.
Eigen::MatrixXd monodromy(const std::vector<Eigen::MatrixXd>& phi_grid,
                          double tau, double h);

// B = log(C^2) / (2*tau), via the real-Schur inverse-scaling-and-squaring
// logarithm. Throws LogarithmExistenceError when C^2 has an eigenvalue on
// the closed negative real axis.
Eigen::MatrixXd real_log_B(const Eigen::MatrixXd& C, double tau);

// Runs the full pipeline for the problem's A(t).
FloquetData build_floquet(const MatrixFn& a_of_t, double tau, double h);

// The reduced problem: constant linear part B, period 2*tau, drift and
// diffusion conjugated through S(t), Lipschitz constants inflated by
// gamma. Checks Condition (A') on B (symmetry is checked, never forced)
// and the inflated margin of Condition (1').
struct LfTransformed {
  SdeProblem problem;
  std::shared_ptr<const FloquetData> data;

  Eigen::VectorXd map_initial(const Eigen::VectorXd& xi, double t0) const;
};

LfTransformed lf_transform(const SdeProblem& periodic_problem,
                           std::shared_ptr<const FloquetData> data);

// X = S(t) Z per node; interior nodes must sit on the S grid, only a
// final partial-step node may fall between nodes (cubic lookup).
Trajectory map_back(const FloquetData& data, const Trajectory& z_trajectory);

}  // namespace rps

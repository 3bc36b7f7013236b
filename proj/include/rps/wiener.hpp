#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

#include "rps/errors.hpp"

namespace rps {

// A two-sided discretised Brownian path on a uniform fine grid, with an
// independent auxiliary stream of the same law used to synthesise the
// mixed integral dZ. All randomness is derived from the constructor seed,
// so rebuilding with the same arguments is bit-identical.
//
// Node values W(t) - W(anchor) are the primary storage (accumulated once,
// ascending in time, with W(anchor) = 0 exactly). Increments are defined
// as differences of stored node values; this makes the single-span
// telescoping identity
//     coarse_increment(t, m) == value_at(t + m*dt_fine) - value_at(t)
// and all theta-shift identities exact in floating point, not just up to
// rounding. Shifts are O(1) views onto the shared storage.
class WienerPath {
 public:
  // Builds a path covering [t_min, t_max] with W(anchor) = 0. Negative-
  // and positive-time increments come from independent sub-seeded
  // streams, as do the auxiliary increments.
  static WienerPath build(std::uint64_t seed, int dim, double dt_fine,
                          double anchor, double t_min, double t_max);

  std::uint64_t seed() const { return store_->seed; }
  int dim() const { return store_->dim; }
  double dt_fine() const { return store_->dt_fine; }
  // Anchor time of this view; value_at(anchor()) == 0.
  double anchor() const { return store_->anchor; }
  std::int64_t n_left() const { return n_left_; }
  std::int64_t n_right() const { return n_right_; }
  std::int64_t n_steps() const { return n_left_ + n_right_; }
  double t_min() const { return store_->anchor - double(n_left_) * store_->dt_fine; }
  double t_max() const { return store_->anchor + double(n_right_) * store_->dt_fine; }

  // W(t) - W(anchor) for t on the fine grid inside the extent.
  Eigen::VectorXd value_at(double t) const;

  // W(t_start + m*dt_fine) - W(t_start); law N(0, m*dt_fine*I_d).
  Eigen::VectorXd coarse_increment(double t_start, std::int64_t m) const;

  // Same aggregation applied to the auxiliary stream (the dV of dZ).
  Eigen::VectorXd aux_increment(double t_start, std::int64_t m) const;

  // Moment-matched realisation of the mixed integral over one coarse
  // step: dZ = dt/2 * (dW + dV/sqrt(3)) with dt = m*dt_fine and dV the
  // aggregated auxiliary increment. E[dZ] = 0, E[|dZ|^2] = d*dt^3/3,
  // E[dZ.dW] = d*dt^2/2.
  Eigen::VectorXd delta_z(double t_start, std::int64_t m) const;

  // The view theta_{n*dt_fine}: value_at(shifted, s) equals
  // value_at(this, s + n*dt_fine) - value_at(this, n*dt_fine). Increments
  // are shared, not resampled. Throws ExtentError if the anchor would
  // leave the stored grid.
  WienerPath shift(std::int64_t n_steps) const;

  // Grid-aligned step count of t relative to the anchor; throws
  // GridAlignmentError when t is off-grid or outside the extent.
  std::int64_t steps_from_anchor(double t) const;

  // Scalar node access on the fine grid (step index relative to the view
  // anchor), for tight quadrature loops. No extent check.
  double node_value(std::int64_t step, int component = 0) const {
    const std::int64_t base = (anchor_node_ + step) * store_->dim + component;
    return store_->nodes[size_t(base)] - store_->nodes[size_t(anchor_node_ * store_->dim + component)];
  }

 private:
  struct Storage {
    std::uint64_t seed = 0;
    int dim = 1;
    double dt_fine = 0.0;
    double anchor = 0.0;
    std::int64_t anchor_node = 0;  // index of the anchor in `nodes`
    std::int64_t n_nodes = 0;      // total grid nodes
    std::vector<double> nodes;     // main stream, node-major, dim entries per node
    std::vector<double> aux_nodes; // auxiliary stream, same layout
  };

  WienerPath(std::shared_ptr<const Storage> store, std::int64_t anchor_node,
             std::int64_t n_left, std::int64_t n_right)
      : store_(std::move(store)), anchor_node_(anchor_node),
        n_left_(n_left), n_right_(n_right) {}

  Eigen::VectorXd diff(const std::vector<double>& nodes, std::int64_t a,
                       std::int64_t b) const;
  std::int64_t checked_node(double t, std::int64_t m) const;

  std::shared_ptr<const Storage> store_;
  std::int64_t anchor_node_;  // node index this view treats as its anchor
  std::int64_t n_left_;
  std::int64_t n_right_;
};

// Seed-derivation helper shared with the ensemble drivers: a splitmix64
// round, used to decorrelate sub-streams of one path seed.
std::uint64_t mix_seed(std::uint64_t x);

// Rounds t/step to the nearest integer and errors out when the remainder
// exceeds the relative alignment tolerance (1e-9).
std::int64_t to_steps(double t, double step, const char* what);

}  // namespace rps

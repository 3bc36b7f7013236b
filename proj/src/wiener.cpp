#include "rps/wiener.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace rps {

std::uint64_t mix_seed(std::uint64_t x) {
  // splitmix64 finaliser
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::int64_t to_steps(double t, double step, const char* what) {
  const double q = t / step;
  const double k = std::round(q);
  if (std::abs(q - k) > 1e-9 * std::max(1.0, std::abs(q))) {
    std::ostringstream msg;
    msg << what << ": " << t << " is not an integral multiple of " << step;
    throw GridAlignmentError(msg.str());
  }
  return std::int64_t(k);
}

namespace {

// Fills `nodes` outward from the anchor so that the anchor node is 0.0
// exactly. Each side draws from its own generator; summation ascends in
// time on the right and descends on the left.
void fill_stream(std::vector<double>& nodes, int dim, std::int64_t anchor_node,
                 std::int64_t n_left, std::int64_t n_right, double sd,
                 std::uint64_t seed_right, std::uint64_t seed_left) {
  const std::int64_t n_nodes = n_left + n_right + 1;
  nodes.assign(size_t(n_nodes) * dim, 0.0);

  std::mt19937_64 rng_r(seed_right);
  std::normal_distribution<double> normal(0.0, sd);
  for (std::int64_t k = anchor_node; k + 1 < n_nodes; ++k) {
    for (int c = 0; c < dim; ++c) {
      nodes[size_t(k + 1) * dim + c] = nodes[size_t(k) * dim + c] + normal(rng_r);
    }
  }
  std::mt19937_64 rng_l(seed_left);
  std::normal_distribution<double> normal_l(0.0, sd);
  for (std::int64_t k = anchor_node; k > 0; --k) {
    for (int c = 0; c < dim; ++c) {
      nodes[size_t(k - 1) * dim + c] = nodes[size_t(k) * dim + c] - normal_l(rng_l);
    }
  }
}

}  // namespace

WienerPath WienerPath::build(std::uint64_t seed, int dim, double dt_fine,
                             double anchor, double t_min, double t_max) {
  if (dt_fine <= 0.0) throw DomainError("build_path: dt_fine must be positive");
  if (dim <= 0) throw DomainError("build_path: dim must be positive");
  if (t_min > anchor || anchor > t_max) {
    throw DomainError("build_path: requires t_min <= anchor <= t_max");
  }
  const std::int64_t n_left = to_steps(anchor - t_min, dt_fine, "build_path window");
  const std::int64_t n_right = to_steps(t_max - anchor, dt_fine, "build_path window");

  auto store = std::make_shared<Storage>();
  store->seed = seed;
  store->dim = dim;
  store->dt_fine = dt_fine;
  store->anchor = anchor;
  store->anchor_node = n_left;
  store->n_nodes = n_left + n_right + 1;

  const double sd = std::sqrt(dt_fine);
  // Stream tags: main right/left, aux right/left.
  fill_stream(store->nodes, dim, n_left, n_left, n_right, sd,
              mix_seed(seed ^ 0x57A7E5EDB00B5ULL),
              mix_seed(seed ^ 0x1E657A7E5EDB1ULL));
  fill_stream(store->aux_nodes, dim, n_left, n_left, n_right, sd,
              mix_seed(seed ^ 0xA0C5EDB00B5EDULL),
              mix_seed(seed ^ 0xB1FF5EDB00B5EULL));

  const std::int64_t anchor_node = store->anchor_node;
  return WienerPath(std::move(store), anchor_node, n_left, n_right);
}

std::int64_t WienerPath::steps_from_anchor(double t) const {
  const std::int64_t k = to_steps(t - store_->anchor, store_->dt_fine, "path time");
  if (k < -n_left_ || k > n_right_) {
    std::ostringstream msg;
    msg << "path time " << t << " outside extent [" << t_min() << ", " << t_max() << "]";
    throw GridAlignmentError(msg.str());
  }
  return k;
}

Eigen::VectorXd WienerPath::diff(const std::vector<double>& nodes,
                                 std::int64_t a, std::int64_t b) const {
  const int d = store_->dim;
  Eigen::VectorXd out(d);
  for (int c = 0; c < d; ++c) {
    out[c] = nodes[size_t(b) * d + c] - nodes[size_t(a) * d + c];
  }
  return out;
}

std::int64_t WienerPath::checked_node(double t, std::int64_t m) const {
  if (m < 1) throw DomainError("coarse_increment: m must be >= 1");
  const std::int64_t k = steps_from_anchor(t);
  if (k + m > n_right_) {
    throw GridAlignmentError("coarse_increment: window end outside extent");
  }
  return anchor_node_ + k;
}

Eigen::VectorXd WienerPath::value_at(double t) const {
  const std::int64_t k = steps_from_anchor(t);
  return diff(store_->nodes, anchor_node_, anchor_node_ + k);
}

Eigen::VectorXd WienerPath::coarse_increment(double t_start, std::int64_t m) const {
  const std::int64_t a = checked_node(t_start, m);
  return diff(store_->nodes, a, a + m);
}

Eigen::VectorXd WienerPath::aux_increment(double t_start, std::int64_t m) const {
  const std::int64_t a = checked_node(t_start, m);
  return diff(store_->aux_nodes, a, a + m);
}

Eigen::VectorXd WienerPath::delta_z(double t_start, std::int64_t m) const {
  const std::int64_t a = checked_node(t_start, m);
  const double dt = double(m) * store_->dt_fine;
  const Eigen::VectorXd dw = diff(store_->nodes, a, a + m);
  const Eigen::VectorXd dv = diff(store_->aux_nodes, a, a + m);
  return 0.5 * dt * (dw + dv / std::sqrt(3.0));
}

WienerPath WienerPath::shift(std::int64_t n_steps) const {
  const std::int64_t new_left = n_left_ + n_steps;
  const std::int64_t new_right = n_right_ - n_steps;
  if (new_left < 0 || new_right < 0) {
    std::ostringstream msg;
    msg << "shift by " << n_steps << " steps moves the anchor outside the stored extent";
    throw ExtentError(msg.str());
  }
  return WienerPath(store_, anchor_node_ + n_steps, new_left, new_right);
}

}  // namespace rps

#pragma once

#include "vnflab/rng.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace vnflab::agents {

struct Transition {
  Eigen::VectorXd state;
  int action_index = 0;
  Eigen::Vector2d params = Eigen::Vector2d::Zero();  // (d_cpu, d_mem)
  double reward = 0;                                 // -Psi
  Eigen::VectorXd next_state;
  int param_index = -1;  // lattice cell, for discretized-parameter learners
};

/// Column-stacked minibatch.
struct Batch {
  Eigen::MatrixXd states;       // D x B
  Eigen::VectorXi actions;      // B
  Eigen::MatrixXd params;       // 2 x B
  Eigen::VectorXd rewards;      // B
  Eigen::MatrixXd next_states;  // D x B
  Eigen::VectorXi param_index;  // B

  Eigen::Index size() const { return rewards.size(); }
};

Batch make_batch(const std::vector<const Transition*>& items);

/// The listed columns of `batch`, in order.
Batch select_columns(const Batch& batch, const std::vector<Eigen::Index>& columns);

/// Fixed-capacity ring; the oldest transition is overwritten first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return items_.empty(); }

  /// Element `i` in insertion order (0 = oldest retained).
  const Transition& at(std::size_t i) const;

  /// Uniform sampling with replacement.
  Batch sample(std::size_t batch_size, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition> items_;
};

}  // namespace vnflab::agents

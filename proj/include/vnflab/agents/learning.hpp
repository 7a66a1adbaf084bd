#pragma once

// Small pieces shared by the actor-critic and Q-learning agents.

#include "vnflab/nn/adam.hpp"
#include "vnflab/nn/mlp.hpp"
#include "vnflab/sim/types.hpp"

#include <Eigen/Dense>

#include <vector>

namespace vnflab::agents {

/// {in, hidden..., out}
std::vector<Eigen::Index> layer_dims(Eigen::Index in, const std::vector<Eigen::Index>& hidden, Eigen::Index out);

Eigen::MatrixXd one_hot(const Eigen::VectorXi& indices, Eigen::Index width);
Eigen::VectorXd one_hot(int index, Eigen::Index width);

/// Column index of the largest entry (first on ties).
int argmax(const Eigen::VectorXd& v);

/// y = r + gamma * min(q1, q2), elementwise.
Eigen::VectorXd td_targets(const Eigen::VectorXd& rewards, const Eigen::VectorXd& q1, const Eigen::VectorXd& q2,
                           double gamma);

/// Clamps (d_cpu, d_mem) to `box` intersected with [-scale, scale].
Eigen::Vector2d clip_to_box(const Eigen::Vector2d& p, const sim::ParamBox& box, const Eigen::Vector2d& scale);

/// Symmetric box [-scale, scale].
sim::ParamBox static_box(const Eigen::Vector2d& scale);

/// One Adam step that ascends an objective whose gradient with respect to the
/// network output (recorded in `tape`) is `objective_grad`.
void policy_ascent_step(nn::Mlp<double>& net, nn::AdamState<double>& adam, const nn::Tape<double>& tape,
                        const Eigen::MatrixXd& objective_grad);

/// max(value - amount, floor)
inline double decay_linear(double value, double amount, double floor) {
  return value - amount > floor ? value - amount : floor;
}

}  // namespace vnflab::agents

#include "vnflab/agents/learning.hpp"

#include <algorithm>
#include <stdexcept>

namespace vnflab::agents {

std::vector<Eigen::Index> layer_dims(Eigen::Index in, const std::vector<Eigen::Index>& hidden, Eigen::Index out) {
  std::vector<Eigen::Index> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

Eigen::MatrixXd one_hot(const Eigen::VectorXi& indices, Eigen::Index width) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(width, indices.size());
  for (Eigen::Index i = 0; i < indices.size(); ++i) {
    if (indices(i) < 0 || indices(i) >= width) throw std::out_of_range("one_hot: index out of range");
    out(indices(i), i) = 1.0;
  }
  return out;
}

Eigen::VectorXd one_hot(int index, Eigen::Index width) {
  if (index < 0 || index >= width) throw std::out_of_range("one_hot: index out of range");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(width);
  out(index) = 1.0;
  return out;
}

int argmax(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  v.maxCoeff(&best);
  return static_cast<int>(best);
}

Eigen::VectorXd td_targets(const Eigen::VectorXd& rewards, const Eigen::VectorXd& q1, const Eigen::VectorXd& q2,
                           double gamma) {
  if (rewards.size() != q1.size() || rewards.size() != q2.size())
    throw std::invalid_argument("td_targets: length mismatch");
  return rewards.array() + gamma * q1.array().min(q2.array());
}

Eigen::Vector2d clip_to_box(const Eigen::Vector2d& p, const sim::ParamBox& box, const Eigen::Vector2d& scale) {
  const double cpu_lo = std::max(box.cpu_lo, -scale(0)), cpu_hi = std::min(box.cpu_hi, scale(0));
  const double mem_lo = std::max(box.mem_lo, -scale(1)), mem_hi = std::min(box.mem_hi, scale(1));
  // An empty intersection collapses onto its lower edge.
  return {std::clamp(p(0), cpu_lo, std::max(cpu_lo, cpu_hi)), std::clamp(p(1), mem_lo, std::max(mem_lo, mem_hi))};
}

sim::ParamBox static_box(const Eigen::Vector2d& scale) { return {-scale(0), scale(0), -scale(1), scale(1)}; }

void policy_ascent_step(nn::Mlp<double>& net, nn::AdamState<double>& adam, const nn::Tape<double>& tape,
                        const Eigen::MatrixXd& objective_grad) {
  const Eigen::MatrixXd loss_grad = -objective_grad;
  nn::adam_step(net, adam, nn::backward(net, tape, loss_grad));
}

}  // namespace vnflab::agents

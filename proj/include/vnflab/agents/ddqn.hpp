#pragma once

#include "vnflab/agents/agent.hpp"
#include "vnflab/agents/replay_buffer.hpp"
#include "vnflab/nn/adam.hpp"
#include "vnflab/nn/mlp.hpp"
#include "vnflab/rng.hpp"

#include <deque>
#include <vector>

namespace vnflab::agents {

/// Hyperparameters shared by the value-based and single-critic baselines.
struct BaselineConfig {
  double gamma = 0.99;
  double tau = 5e-3;
  double eps = 0.8, eps_min = 0.05, eps_decay = 1e-3;
  double lr = 1e-3;
  double sigma_noise = 0.2;  // parameter noise (single-critic variant only)
  double clip_c = 0.5, clip_c_min = 0.1;
  int batch_size = 128;
  int buffer_capacity = 100000;
  int warmup_size = 5000;
  int updates_per_epoch = 1;
  double resolution = 5;
  int alternation_period = 100;  // train steps per phase before switching networks
  std::vector<Eigen::Index> hidden{128, 64};
  double init_std = 1e-2;

  void validate() const;

  friend bool operator==(const BaselineConfig&, const BaselineConfig&) = default;
};

/// Cell-centred lattice of (d_cpu, d_mem) deltas over [-span/2, span/2]^2.
class DiscretizedGrid {
 public:
  DiscretizedGrid(Eigen::Vector2d span, double resolution);

  int size() const { return static_cast<int>(cpu_levels_.size() * mem_levels_.size()); }
  const std::vector<double>& cpu_levels() const { return cpu_levels_; }
  const std::vector<double>& mem_levels() const { return mem_levels_; }
  /// Cell index -> delta pair; memory varies fastest.
  Eigen::Vector2d at(int index) const;
  int nearest(const Eigen::Vector2d& p) const;

 private:
  std::vector<double> cpu_levels_, mem_levels_;
};

/// Double-Q targets: y = r + gamma * Q_target(s', argmax_a Q_online(s', a)).
/// Q matrices are actions x batch.
Eigen::VectorXd double_q_targets(const Eigen::VectorXd& rewards, const Eigen::MatrixXd& online_next,
                                 const Eigen::MatrixXd& target_next, double gamma);

/// A Q-network with a lagged target copy.
struct QLearner {
  nn::Mlp<double> online, target;
  nn::AdamState<double> adam;

  QLearner() = default;
  QLearner(const std::vector<Eigen::Index>& dims, double lr, double init_std, Rng& rng);

  /// One Adam step on the mean squared error of the chosen outputs.
  double fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXi& chosen, const Eigen::VectorXd& targets);
  void soft_update(double tau) { nn::soft_update(target, online, tau); }

  void save(std::ostream& os) const;
  void load(std::istream& is);
};

/// Discrete server selector paired with a Q-network over the parameter
/// lattice; the two are trained in alternating phases.
class DdqnAgent : public Agent {
 public:
  DdqnAgent(BaselineConfig config, AgentShape shape, std::uint64_t seed);

  std::string name() const override { return "ddqn"; }
  sim::ParamAction act(const sim::DecisionPoint& point, bool explore) override;
  bool learns() const override { return true; }
  void observe(const sim::TransitionRecord& record) override;
  TrainReport train() override;
  Exploration exploration() const override { return {eps_, 0.0}; }
  void save(std::ostream& os) const override;
  void load(std::istream& is) override;

  /// Returns the action and the lattice cell it came from (-1 for offload).
  std::pair<sim::ParamAction, int> select(const Eigen::VectorXd& state, bool explore, const BoxFn& box_for = {});
  TrainReport train_step();
  bool server_phase() const { return (steps_ / config_.alternation_period) % 2 == 0; }

  const DiscretizedGrid& grid() const { return grid_; }
  const QLearner& servers() const { return servers_; }
  const QLearner& params() const { return params_; }
  double eps() const { return eps_; }
  long steps() const { return steps_; }
  void store(Transition t) { buffer_.push(std::move(t)); }

 private:
  BaselineConfig config_;
  AgentShape shape_;
  Rng rng_;
  ReplayBuffer buffer_;
  DiscretizedGrid grid_;
  QLearner servers_, params_;
  std::deque<int> pending_cells_;  // lattice cells of explored actions awaiting observe()
  double eps_;
  long steps_ = 0;
};

/// Trains the server selector one step on a batch (double-Q rule).
double train_server_selector(QLearner& selector, const Batch& batch, double gamma, double tau);

}  // namespace vnflab::agents

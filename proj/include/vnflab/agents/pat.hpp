#pragma once

#include "vnflab/agents/agent.hpp"
#include "vnflab/agents/replay_buffer.hpp"
#include "vnflab/nn/adam.hpp"
#include "vnflab/nn/mlp.hpp"
#include "vnflab/rng.hpp"

#include <functional>
#include <vector>

namespace vnflab::agents {

struct PatConfig {
  double gamma = 0.99;
  double tau = 5e-3;
  double eps = 0.8, eps_min = 0.05, eps_decay = 1e-3;
  double lr = 1e-3;
  double sigma_noise = 0.2;
  double clip_c = 0.5, clip_c_min = 0.1;
  double beta = 0.2;
  double gamma_max = 100;
  int batch_size = 128;
  int buffer_capacity = 100000;
  int warmup_size = 5000;
  int updates_per_epoch = 1;
  std::vector<Eigen::Index> hidden{128, 64};
  double init_std = 1e-2;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;

  friend bool operator==(const PatConfig&, const PatConfig&) = default;
};

struct TargetEstimates {
  Eigen::VectorXd y;
  Eigen::VectorXd q1, q2;          // target critics at (s', a-, p-)
  Eigen::VectorXi next_actions;    // a-
  Eigen::MatrixXd next_params;     // p-, 2 x B
};

struct CriticLosses {
  double critic1 = 0;
  double critic2 = 0;
};

/// Parameterized-action twin-critic learner.
class PatAgent : public Agent {
 public:
  PatAgent(PatConfig config, AgentShape shape, std::uint64_t seed);

  std::string name() const override { return "pat"; }
  sim::ParamAction act(const sim::DecisionPoint& point, bool explore) override;
  bool learns() const override { return true; }
  void observe(const sim::TransitionRecord& record) override;
  TrainReport train() override;
  Exploration exploration() const override { return {eps_, clip_c_}; }
  void save(std::ostream& os) const override;
  void load(std::istream& is) override;

  /// Chooses a target and its parameters. `box_for(k)` gives the feasible
  /// deltas of server k; without it the symmetric scale box is used.
  sim::ParamAction select_action(const Eigen::VectorXd& state, bool explore, const BoxFn& box_for = {});

  void store(Transition t);

  /// clip(N(0, sigma^2) * scale, -c * scale, c * scale) with the current c.
  Eigen::Vector2d exploration_noise();

  TargetEstimates compute_targets(const Batch& batch);
  CriticLosses update_critics(const Batch& batch, const Eigen::VectorXd& targets);
  void update_actors(const Batch& batch);
  /// One full learner update; a no-op (trained = false) before warmup.
  TrainReport train_step();

  /// [state; action vector; params / scale], columnwise.
  Eigen::MatrixXd critic_input(const Eigen::MatrixXd& states, const Eigen::MatrixXd& action_vectors,
                               const Eigen::MatrixXd& params) const;
  /// [state; one-hot action], columnwise.
  Eigen::MatrixXd param_input(const Eigen::MatrixXd& states, const Eigen::VectorXi& actions) const;

  const PatConfig& config() const { return config_; }
  const AgentShape& shape() const { return shape_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  double eps() const { return eps_; }
  double clip_c() const { return clip_c_; }
  long steps() const { return steps_; }
  Rng& rng() { return rng_; }

  nn::Mlp<double>& actor_action() { return actor_action_; }
  nn::Mlp<double>& actor_param() { return actor_param_; }
  nn::Mlp<double>& critic(int i) { return i == 0 ? critic1_ : critic2_; }
  nn::Mlp<double>& target_actor_action() { return target_actor_action_; }
  nn::Mlp<double>& target_actor_param() { return target_actor_param_; }
  nn::Mlp<double>& target_critic(int i) { return i == 0 ? target_critic1_ : target_critic2_; }
  const nn::Mlp<double>& actor_action() const { return actor_action_; }
  const nn::Mlp<double>& actor_param() const { return actor_param_; }
  const nn::Mlp<double>& critic(int i) const { return i == 0 ? critic1_ : critic2_; }
  const nn::Mlp<double>& target_actor_action() const { return target_actor_action_; }
  const nn::Mlp<double>& target_actor_param() const { return target_actor_param_; }
  const nn::Mlp<double>& target_critic(int i) const { return i == 0 ? target_critic1_ : target_critic2_; }

 private:
  Eigen::MatrixXd masked_params(Eigen::MatrixXd params, const Eigen::VectorXi& actions) const;

  PatConfig config_;
  AgentShape shape_;
  Rng rng_;
  ReplayBuffer buffer_;

  nn::Mlp<double> actor_action_, actor_param_, critic1_, critic2_;
  nn::Mlp<double> target_actor_action_, target_actor_param_, target_critic1_, target_critic2_;
  nn::AdamState<double> adam_action_, adam_param_, adam_critic1_, adam_critic2_;

  double eps_;
  double clip_c_;
  long steps_ = 0;
};

}  // namespace vnflab::agents

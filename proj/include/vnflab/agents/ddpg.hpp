#pragma once

#include "vnflab/agents/agent.hpp"
#include "vnflab/agents/ddqn.hpp"
#include "vnflab/agents/replay_buffer.hpp"
#include "vnflab/nn/adam.hpp"
#include "vnflab/nn/mlp.hpp"
#include "vnflab/rng.hpp"

namespace vnflab::agents {

struct SingleCriticTargets {
  Eigen::VectorXd y;
  Eigen::VectorXd q;  // target critic at (s', a', mu-(s', a'))
  Eigen::VectorXi next_actions;
};

/// Deterministic-policy-gradient parameter actor with one critic and no
/// target smoothing, paired with the double-Q server selector; the selector
/// and the actor/critic pair train in alternating phases.
class DdpgAgent : public Agent {
 public:
  DdpgAgent(BaselineConfig config, AgentShape shape, std::uint64_t seed);

  std::string name() const override { return "ddpg"; }
  sim::ParamAction act(const sim::DecisionPoint& point, bool explore) override;
  bool learns() const override { return true; }
  void observe(const sim::TransitionRecord& record) override;
  TrainReport train() override;
  Exploration exploration() const override { return {eps_, clip_c_}; }
  void save(std::ostream& os) const override;
  void load(std::istream& is) override;

  sim::ParamAction select_action(const Eigen::VectorXd& state, bool explore, const BoxFn& box_for = {});
  SingleCriticTargets compute_targets(const Batch& batch);
  double update_critic(const Batch& batch, const Eigen::VectorXd& targets);
  void update_actor(const Batch& batch);
  TrainReport train_step();
  bool server_phase() const { return (steps_ / config_.alternation_period) % 2 == 0; }

  void store(Transition t) { buffer_.push(std::move(t)); }
  double eps() const { return eps_; }
  double clip_c() const { return clip_c_; }
  long steps() const { return steps_; }
  const QLearner& servers() const { return servers_; }
  nn::Mlp<double>& actor() { return actor_; }
  nn::Mlp<double>& critic() { return critic_; }
  const nn::Mlp<double>& target_critic() const { return target_critic_; }

 private:
  Eigen::MatrixXd critic_input(const Eigen::MatrixXd& states, const Eigen::VectorXi& actions,
                               const Eigen::MatrixXd& params) const;
  Eigen::MatrixXd actor_input(const Eigen::MatrixXd& states, const Eigen::VectorXi& actions) const;

  BaselineConfig config_;
  AgentShape shape_;
  Rng rng_;
  ReplayBuffer buffer_;
  QLearner servers_;
  nn::Mlp<double> actor_, critic_, target_actor_, target_critic_;
  nn::AdamState<double> adam_actor_, adam_critic_;
  double eps_;
  double clip_c_;
  long steps_ = 0;
};

}  // namespace vnflab::agents

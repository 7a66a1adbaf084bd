#include "vnflab/agents/ddpg.hpp"

#include "vnflab/agents/learning.hpp"
#include "vnflab/nn/checkpoint.hpp"
#include "vnflab/sim/encoding.hpp"

#include <array>
#include <random>
#include <stdexcept>
#include <string>

namespace vnflab::agents {

DdpgAgent::DdpgAgent(BaselineConfig config, AgentShape shape, std::uint64_t seed)
    : config_(std::move(config)),
      shape_(shape),
      rng_(make_stream(seed, "agent/ddpg")),
      buffer_(static_cast<std::size_t>(std::max(config_.buffer_capacity, 1))),
      eps_(config_.eps),
      clip_c_(config_.clip_c) {
  config_.validate();
  if (shape_.state_size <= 0 || shape_.servers <= 0) throw std::invalid_argument("DdpgAgent: empty problem shape");
  const Eigen::Index d = shape_.state_size, a = shape_.actions();
  servers_ = QLearner(layer_dims(d, config_.hidden, a), config_.lr, config_.init_std, rng_);
  actor_ = nn::Mlp<double>(layer_dims(d + a, config_.hidden, 2), nn::Head::scaled_tanh, shape_.param_scale);
  critic_ = nn::Mlp<double>(layer_dims(d + a + 2, config_.hidden, 1), nn::Head::linear);
  nn::xavier_init(actor_, rng_, config_.init_std);
  nn::xavier_init(critic_, rng_, config_.init_std);
  target_actor_ = actor_;
  target_critic_ = critic_;
  adam_actor_ = nn::make_adam(actor_, config_.lr);
  adam_critic_ = nn::make_adam(critic_, config_.lr);
}

Eigen::MatrixXd DdpgAgent::actor_input(const Eigen::MatrixXd& states, const Eigen::VectorXi& actions) const {
  Eigen::MatrixXd x(states.rows() + shape_.actions(), states.cols());
  x << states, one_hot(actions, shape_.actions());
  return x;
}

Eigen::MatrixXd DdpgAgent::critic_input(const Eigen::MatrixXd& states, const Eigen::VectorXi& actions,
                                        const Eigen::MatrixXd& params) const {
  Eigen::MatrixXd scaled = params.array().colwise() / shape_.param_scale.array();
  for (Eigen::Index i = 0; i < actions.size(); ++i)
    if (actions(i) == shape_.cloud()) scaled.col(i).setZero();
  Eigen::MatrixXd x(states.rows() + shape_.actions() + 2, states.cols());
  x << states, one_hot(actions, shape_.actions()), scaled;
  return x;
}

sim::ParamAction DdpgAgent::select_action(const Eigen::VectorXd& state, bool explore, const BoxFn& box_for) {
  int a = 0;
  if (explore && std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < eps_) {
    a = std::uniform_int_distribution<int>(0, shape_.cloud())(rng_);
  } else {
    a = argmax(nn::forward(servers_.online, state));
  }
  if (a == shape_.cloud()) return {a, 0.0, 0.0};

  Eigen::VectorXd x(state.size() + shape_.actions());
  x << state, one_hot(a, shape_.actions());
  Eigen::Vector2d p = nn::forward(actor_, x);
  if (explore) {
    std::normal_distribution<double> normal(0.0, config_.sigma_noise);
    for (int i = 0; i < 2; ++i) {
      const double bound = clip_c_ * shape_.param_scale(i);
      p(i) += std::clamp(normal(rng_) * shape_.param_scale(i), -bound, bound);
    }
  }
  const sim::ParamBox box = box_for ? box_for(a) : static_box(shape_.param_scale);
  p = clip_to_box(p, box, shape_.param_scale);
  return {a, p(0), p(1)};
}

sim::ParamAction DdpgAgent::act(const sim::DecisionPoint& point, bool explore) {
  return select_action(point.features, explore, [&point](int k) {
    return sim::instance_box(point.state, point.model, k, point.vnf);
  });
}

void DdpgAgent::observe(const sim::TransitionRecord& record) {
  Transition t;
  t.state = record.state;
  t.action_index = record.action.target;
  if (record.action.target != shape_.cloud()) t.params = {record.action.d_cpu, record.action.d_mem};
  t.reward = -record.cost_psi;
  t.next_state = record.next_state;
  store(std::move(t));
}

SingleCriticTargets DdpgAgent::compute_targets(const Batch& batch) {
  SingleCriticTargets out;
  const Eigen::MatrixXd scores = nn::forward(servers_.online, batch.next_states);
  out.next_actions.resize(batch.size());
  for (Eigen::Index i = 0; i < batch.size(); ++i) out.next_actions(i) = argmax(scores.col(i));
  const Eigen::MatrixXd p = nn::forward(target_actor_, actor_input(batch.next_states, out.next_actions));
  out.q = nn::forward(target_critic_, critic_input(batch.next_states, out.next_actions, p)).row(0).transpose();
  out.y = batch.rewards.array() + config_.gamma * out.q.array();
  return out;
}

double DdpgAgent::update_critic(const Batch& batch, const Eigen::VectorXd& targets) {
  const double n = static_cast<double>(batch.size());
  nn::Tape<double> tape;
  const Eigen::RowVectorXd residual =
      nn::forward(critic_, critic_input(batch.states, batch.actions, batch.params), tape).row(0) -
      targets.transpose();
  const Eigen::MatrixXd grad = (2.0 / n) * residual;
  nn::adam_step(critic_, adam_critic_, nn::backward(critic_, tape, grad));
  return residual.squaredNorm() / n;
}

void DdpgAgent::update_actor(const Batch& batch) {
  const double n = static_cast<double>(batch.size());
  nn::Tape<double> actor_tape, critic_tape;
  const Eigen::MatrixXd p = nn::forward(actor_, actor_input(batch.states, batch.actions), actor_tape);
  nn::forward(critic_, critic_input(batch.states, batch.actions, p), critic_tape);
  const Eigen::MatrixXd ascend = Eigen::MatrixXd::Constant(1, batch.size(), 1.0 / n);
  const Eigen::MatrixXd dx = nn::input_grad(critic_, critic_tape, ascend);
  Eigen::MatrixXd dp = dx.bottomRows(2).array().colwise() / shape_.param_scale.array();
  for (Eigen::Index i = 0; i < batch.size(); ++i)
    if (batch.actions(i) == shape_.cloud()) dp.col(i).setZero();
  policy_ascent_step(actor_, adam_actor_, actor_tape, dp);
}

TrainReport DdpgAgent::train_step() {
  TrainReport report;
  if (buffer_.size() < static_cast<std::size_t>(config_.warmup_size) || buffer_.empty()) return report;
  const Batch batch = buffer_.sample(static_cast<std::size_t>(config_.batch_size), rng_);
  if (server_phase()) {
    report.critic_loss = train_server_selector(servers_, batch, config_.gamma, config_.tau);
  } else {
    report.critic_loss = update_critic(batch, compute_targets(batch).y);
    update_actor(batch);
    nn::soft_update(target_actor_, actor_, config_.tau);
    nn::soft_update(target_critic_, critic_, config_.tau);
  }
  ++steps_;
  eps_ = decay_linear(config_.eps, config_.eps_decay * static_cast<double>(steps_), config_.eps_min);
  clip_c_ = decay_linear(config_.clip_c, config_.eps_decay * static_cast<double>(steps_), config_.clip_c_min);
  report.trained = true;
  report.updates = 1;
  return report;
}

TrainReport DdpgAgent::train() {
  return repeat_updates(config_.updates_per_epoch, [this] { return train_step(); });
}

void DdpgAgent::save(std::ostream& os) const {
  const auto prec = os.precision();
  os.precision(17);
  os << "ddpg " << eps_ << ' ' << clip_c_ << ' ' << steps_ << '\n';
  os.precision(prec);
  servers_.save(os);
  for (const auto* net : {&actor_, &critic_, &target_actor_, &target_critic_}) nn::write_mlp(os, *net);
  nn::write_adam(os, adam_actor_);
  nn::write_adam(os, adam_critic_);
}

void DdpgAgent::load(std::istream& is) {
  std::string tag;
  double eps = 0, clip_c = 0;
  long steps = 0;
  is >> tag >> eps >> clip_c >> steps;
  if (!is || tag != "ddpg") throw std::runtime_error("checkpoint: not a ddpg checkpoint");
  QLearner servers = servers_;
  servers.load(is);
  std::array<nn::Mlp<double>, 4> nets;
  const std::array<const nn::Mlp<double>*, 4> live{&actor_, &critic_, &target_actor_, &target_critic_};
  for (std::size_t i = 0; i < nets.size(); ++i) {
    nets[i] = nn::read_mlp<double>(is);
    if (!nets[i].same_shape(*live[i])) throw std::runtime_error("checkpoint: ddpg network shape mismatch");
  }
  nn::AdamState<double> adam_actor = nn::read_adam<double>(is);
  nn::AdamState<double> adam_critic = nn::read_adam<double>(is);
  if (adam_actor.m.size() != actor_.layers().size() || adam_critic.m.size() != critic_.layers().size())
    throw std::runtime_error("checkpoint: ddpg optimizer shape mismatch");
  servers_ = std::move(servers);
  actor_ = std::move(nets[0]);
  critic_ = std::move(nets[1]);
  target_actor_ = std::move(nets[2]);
  target_critic_ = std::move(nets[3]);
  adam_actor_ = std::move(adam_actor);
  adam_critic_ = std::move(adam_critic);
  eps_ = eps;
  clip_c_ = clip_c;
  steps_ = steps;
}

}  // namespace vnflab::agents

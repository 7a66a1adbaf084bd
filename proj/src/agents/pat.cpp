#include "vnflab/agents/pat.hpp"

#include "vnflab/agents/learning.hpp"
#include "vnflab/nn/checkpoint.hpp"
#include "vnflab/sim/encoding.hpp"

#include <array>
#include <random>
#include <stdexcept>
#include <string>

namespace vnflab::agents {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("PatConfig: ") + what);
}

void load_into(std::istream& is, nn::Mlp<double>& net, const char* label) {
  nn::Mlp<double> loaded = nn::read_mlp<double>(is);
  if (!loaded.same_shape(net)) throw std::runtime_error(std::string("checkpoint: shape mismatch for ") + label);
  net = std::move(loaded);
}

void load_into(std::istream& is, nn::AdamState<double>& adam, const nn::Mlp<double>& net, const char* label) {
  nn::AdamState<double> loaded = nn::read_adam<double>(is);
  if (loaded.m.size() != net.layers().size())
    throw std::runtime_error(std::string("checkpoint: optimizer shape mismatch for ") + label);
  for (std::size_t i = 0; i < loaded.m.size(); ++i)
    if (loaded.m[i].weight.rows() != net.layers()[i].weight.rows() ||
        loaded.m[i].weight.cols() != net.layers()[i].weight.cols())
      throw std::runtime_error(std::string("checkpoint: optimizer shape mismatch for ") + label);
  adam = std::move(loaded);
}

}  // namespace

void PatConfig::validate() const {
  require(gamma >= 0 && gamma <= 1, "gamma must lie in [0, 1]");
  require(tau > 0 && tau <= 1, "tau must lie in (0, 1]");
  require(eps_min >= 0 && eps_min <= eps && eps <= 1, "need 0 <= eps_min <= eps <= 1");
  require(eps_decay >= 0, "eps_decay must be non-negative");
  require(lr > 0, "lr must be positive");
  require(sigma_noise >= 0, "sigma_noise must be non-negative");
  require(clip_c_min >= 0 && clip_c_min <= clip_c, "need 0 <= clip_c_min <= clip_c");
  require(gamma_max > 0, "gamma_max must be positive");
  require(batch_size > 0, "batch_size must be positive");
  require(batch_size <= warmup_size && warmup_size <= buffer_capacity,
          "need batch_size <= warmup_size <= buffer_capacity");
  require(updates_per_epoch >= 0, "updates_per_epoch must be non-negative");
  require(!hidden.empty(), "hidden must list at least one layer");
  for (Eigen::Index h : hidden) require(h > 0, "hidden widths must be positive");
  require(init_std > 0, "init_std must be positive");
}

PatAgent::PatAgent(PatConfig config, AgentShape shape, std::uint64_t seed)
    : config_(std::move(config)),
      shape_(shape),
      rng_(make_stream(seed, "agent/pat")),
      buffer_(static_cast<std::size_t>(std::max(config_.buffer_capacity, 1))),
      eps_(config_.eps),
      clip_c_(config_.clip_c) {
  config_.validate();
  if (shape_.state_size <= 0 || shape_.servers <= 0) throw std::invalid_argument("PatAgent: empty problem shape");
  const Eigen::Index d = shape_.state_size, a = shape_.actions();
  actor_action_ = nn::Mlp<double>(layer_dims(d, config_.hidden, a), nn::Head::softmax);
  actor_param_ = nn::Mlp<double>(layer_dims(d + a, config_.hidden, 2), nn::Head::scaled_tanh, shape_.param_scale);
  critic1_ = nn::Mlp<double>(layer_dims(d + a + 2, config_.hidden, 1), nn::Head::linear);
  critic2_ = critic1_;
  for (auto* net : {&actor_action_, &actor_param_, &critic1_, &critic2_}) nn::xavier_init(*net, rng_, config_.init_std);

  target_actor_action_ = actor_action_;
  target_actor_param_ = actor_param_;
  target_critic1_ = critic1_;
  target_critic2_ = critic2_;

  adam_action_ = nn::make_adam(actor_action_, config_.lr);
  adam_param_ = nn::make_adam(actor_param_, config_.lr);
  adam_critic1_ = nn::make_adam(critic1_, config_.lr);
  adam_critic2_ = nn::make_adam(critic2_, config_.lr);
}

Eigen::Vector2d PatAgent::exploration_noise() {
  std::normal_distribution<double> normal(0.0, config_.sigma_noise);
  Eigen::Vector2d w;
  for (int i = 0; i < 2; ++i) {
    const double bound = clip_c_ * shape_.param_scale(i);
    w(i) = std::clamp(normal(rng_) * shape_.param_scale(i), -bound, bound);
  }
  return w;
}

sim::ParamAction PatAgent::select_action(const Eigen::VectorXd& state, bool explore, const BoxFn& box_for) {
  if (state.size() != shape_.state_size) throw std::invalid_argument("select_action: state length mismatch");
  int a = 0;
  if (explore && std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < eps_) {
    a = std::uniform_int_distribution<int>(0, shape_.cloud())(rng_);
  } else {
    a = argmax(nn::forward(actor_action_, state));
  }
  if (a == shape_.cloud()) return {a, 0.0, 0.0};

  Eigen::VectorXd x(state.size() + shape_.actions());
  x << state, one_hot(a, shape_.actions());
  Eigen::Vector2d p = nn::forward(actor_param_, x);
  if (explore) p += exploration_noise();
  const sim::ParamBox box = box_for ? box_for(a) : static_box(shape_.param_scale);
  p = clip_to_box(p, box, shape_.param_scale);
  return {a, p(0), p(1)};
}

sim::ParamAction PatAgent::act(const sim::DecisionPoint& point, bool explore) {
  return select_action(point.features, explore, [&point](int k) {
    return sim::instance_box(point.state, point.model, k, point.vnf);
  });
}

void PatAgent::store(Transition t) { buffer_.push(std::move(t)); }

void PatAgent::observe(const sim::TransitionRecord& record) {
  Transition t;
  t.state = record.state;
  t.action_index = record.action.target;
  if (record.action.target != shape_.cloud()) t.params = {record.action.d_cpu, record.action.d_mem};
  t.reward = -record.cost_psi;
  t.next_state = record.next_state;
  store(std::move(t));
}

Eigen::MatrixXd PatAgent::critic_input(const Eigen::MatrixXd& states, const Eigen::MatrixXd& action_vectors,
                                       const Eigen::MatrixXd& params) const {
  Eigen::MatrixXd x(states.rows() + action_vectors.rows() + 2, states.cols());
  x.topRows(states.rows()) = states;
  x.middleRows(states.rows(), action_vectors.rows()) = action_vectors;
  x.bottomRows(2) = params.array().colwise() / shape_.param_scale.array();
  return x;
}

Eigen::MatrixXd PatAgent::param_input(const Eigen::MatrixXd& states, const Eigen::VectorXi& actions) const {
  Eigen::MatrixXd x(states.rows() + shape_.actions(), states.cols());
  x.topRows(states.rows()) = states;
  x.bottomRows(shape_.actions()) = one_hot(actions, shape_.actions());
  return x;
}

// Offload columns carry no parameters.
Eigen::MatrixXd PatAgent::masked_params(Eigen::MatrixXd params, const Eigen::VectorXi& actions) const {
  for (Eigen::Index i = 0; i < actions.size(); ++i)
    if (actions(i) == shape_.cloud()) params.col(i).setZero();
  return params;
}

TargetEstimates PatAgent::compute_targets(const Batch& batch) {
  const Eigen::Index b = batch.size();
  TargetEstimates out;
  const Eigen::MatrixXd scores = nn::forward(target_actor_action_, batch.next_states);
  out.next_actions.resize(b);
  for (Eigen::Index i = 0; i < b; ++i) out.next_actions(i) = argmax(scores.col(i));

  Eigen::MatrixXd p = nn::forward(target_actor_param_, param_input(batch.next_states, out.next_actions));
  const sim::ParamBox box = static_box(shape_.param_scale);
  for (Eigen::Index i = 0; i < b; ++i)
    p.col(i) = clip_to_box(Eigen::Vector2d(p.col(i)) + exploration_noise(), box, shape_.param_scale);
  out.next_params = masked_params(std::move(p), out.next_actions);

  const Eigen::MatrixXd x =
      critic_input(batch.next_states, one_hot(out.next_actions, shape_.actions()), out.next_params);
  out.q1 = nn::forward(target_critic1_, x).row(0).transpose();
  out.q2 = nn::forward(target_critic2_, x).row(0).transpose();
  out.y = td_targets(batch.rewards, out.q1, out.q2, config_.gamma);
  return out;
}

CriticLosses PatAgent::update_critics(const Batch& batch, const Eigen::VectorXd& targets) {
  const Eigen::MatrixXd x = critic_input(batch.states, one_hot(batch.actions, shape_.actions()),
                                         masked_params(batch.params, batch.actions));
  const double n = static_cast<double>(batch.size());
  CriticLosses losses;
  auto fit = [&](nn::Mlp<double>& critic, nn::AdamState<double>& adam) {
    nn::Tape<double> tape;
    const Eigen::RowVectorXd residual = nn::forward(critic, x, tape).row(0) - targets.transpose();
    const Eigen::MatrixXd grad = (2.0 / n) * residual;
    nn::adam_step(critic, adam, nn::backward(critic, tape, grad));
    return residual.squaredNorm() / n;
  };
  losses.critic1 = fit(critic1_, adam_critic1_);
  losses.critic2 = fit(critic2_, adam_critic2_);
  return losses;
}

void PatAgent::update_actors(const Batch& batch) {
  const Eigen::Index d = shape_.state_size, a = shape_.actions();
  const double n = static_cast<double>(batch.size());
  const Eigen::MatrixXd ascend = Eigen::MatrixXd::Constant(1, batch.size(), 1.0 / n);

  // Action actor through the soft action vector.
  {
    nn::Tape<double> actor_tape, critic_tape;
    const Eigen::MatrixXd soft = nn::forward(actor_action_, batch.states, actor_tape);
    nn::forward(critic1_, critic_input(batch.states, soft, masked_params(batch.params, batch.actions)), critic_tape);
    const Eigen::MatrixXd dx = nn::input_grad(critic1_, critic_tape, ascend);
    policy_ascent_step(actor_action_, adam_action_, actor_tape, dx.middleRows(d, a));
  }
  // Parameter actor at the taken actions.
  {
    nn::Tape<double> actor_tape, critic_tape;
    const Eigen::MatrixXd p = nn::forward(actor_param_, param_input(batch.states, batch.actions), actor_tape);
    nn::forward(critic1_,
                critic_input(batch.states, one_hot(batch.actions, a), masked_params(p, batch.actions)), critic_tape);
    const Eigen::MatrixXd dx = nn::input_grad(critic1_, critic_tape, ascend);
    Eigen::MatrixXd dp = dx.bottomRows(2).array().colwise() / shape_.param_scale.array();
    dp = masked_params(std::move(dp), batch.actions);
    policy_ascent_step(actor_param_, adam_param_, actor_tape, dp);
  }
}

TrainReport PatAgent::train_step() {
  TrainReport report;
  if (buffer_.size() < static_cast<std::size_t>(config_.warmup_size) || buffer_.empty()) return report;
  const Batch batch = buffer_.sample(static_cast<std::size_t>(config_.batch_size), rng_);
  const TargetEstimates targets = compute_targets(batch);
  const CriticLosses losses = update_critics(batch, targets.y);
  update_actors(batch);

  nn::soft_update(target_actor_action_, actor_action_, config_.tau);
  nn::soft_update(target_actor_param_, actor_param_, config_.tau);
  nn::soft_update(target_critic1_, critic1_, config_.tau);
  nn::soft_update(target_critic2_, critic2_, config_.tau);

  ++steps_;
  eps_ = decay_linear(config_.eps, config_.eps_decay * static_cast<double>(steps_), config_.eps_min);
  clip_c_ = decay_linear(config_.clip_c, config_.eps_decay * static_cast<double>(steps_), config_.clip_c_min);

  report.trained = true;
  report.updates = 1;
  report.critic_loss = 0.5 * (losses.critic1 + losses.critic2);
  return report;
}

TrainReport PatAgent::train() {
  return repeat_updates(config_.updates_per_epoch, [this] { return train_step(); });
}

void PatAgent::save(std::ostream& os) const {
  const auto prec = os.precision();
  os.precision(17);
  os << "pat " << eps_ << ' ' << clip_c_ << ' ' << steps_ << '\n';
  os.precision(prec);
  for (const auto* net : {&actor_action_, &actor_param_, &critic1_, &critic2_, &target_actor_action_,
                          &target_actor_param_, &target_critic1_, &target_critic2_})
    nn::write_mlp(os, *net);
  for (const auto* adam : {&adam_action_, &adam_param_, &adam_critic1_, &adam_critic2_}) nn::write_adam(os, *adam);
}

void PatAgent::load(std::istream& is) {
  std::string tag;
  double eps = 0, clip_c = 0;
  long steps = 0;
  is >> tag >> eps >> clip_c >> steps;
  if (!is || tag != "pat") throw std::runtime_error("checkpoint: not a pat checkpoint");
  // Stage everything so a failed load leaves the agent untouched.
  std::array<nn::Mlp<double>, 8> nets{actor_action_,        actor_param_,        critic1_,        critic2_,
                                      target_actor_action_, target_actor_param_, target_critic1_, target_critic2_};
  static constexpr std::array<const char*, 8> labels{"actor_action",        "actor_param",        "critic_1",
                                                     "critic_2",            "target_actor_action", "target_actor_param",
                                                     "target_critic_1",     "target_critic_2"};
  for (std::size_t i = 0; i < nets.size(); ++i) load_into(is, nets[i], labels[i]);
  std::array<nn::AdamState<double>, 4> adams;
  for (std::size_t i = 0; i < adams.size(); ++i) load_into(is, adams[i], nets[i], labels[i]);

  actor_action_ = std::move(nets[0]);
  actor_param_ = std::move(nets[1]);
  critic1_ = std::move(nets[2]);
  critic2_ = std::move(nets[3]);
  target_actor_action_ = std::move(nets[4]);
  target_actor_param_ = std::move(nets[5]);
  target_critic1_ = std::move(nets[6]);
  target_critic2_ = std::move(nets[7]);
  adam_action_ = std::move(adams[0]);
  adam_param_ = std::move(adams[1]);
  adam_critic1_ = std::move(adams[2]);
  adam_critic2_ = std::move(adams[3]);
  eps_ = eps;
  clip_c_ = clip_c;
  steps_ = steps;
}

}  // namespace vnflab::agents

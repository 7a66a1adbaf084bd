#include "vnflab/agents/ddqn.hpp"

#include "vnflab/agents/learning.hpp"
#include "vnflab/nn/checkpoint.hpp"
#include "vnflab/sim/encoding.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace vnflab::agents {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("BaselineConfig: ") + what);
}

std::vector<double> centred_levels(double span, double resolution) {
  const int cells = static_cast<int>(std::floor(span / resolution + 1e-9));
  if (cells < 1) throw std::invalid_argument("DiscretizedGrid: span smaller than one cell");
  std::vector<double> levels(static_cast<std::size_t>(cells));
  const double first = -0.5 * cells * resolution + 0.5 * resolution;
  for (int i = 0; i < cells; ++i) levels[static_cast<std::size_t>(i)] = first + i * resolution;
  return levels;
}

int nearest_level(const std::vector<double>& levels, double x) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(levels.size()); ++i)
    if (std::abs(levels[static_cast<std::size_t>(i)] - x) < std::abs(levels[static_cast<std::size_t>(best)] - x))
      best = i;
  return best;
}

}  // namespace

void BaselineConfig::validate() const {
  require(gamma >= 0 && gamma <= 1, "gamma must lie in [0, 1]");
  require(tau > 0 && tau <= 1, "tau must lie in (0, 1]");
  require(eps_min >= 0 && eps_min <= eps && eps <= 1, "need 0 <= eps_min <= eps <= 1");
  require(eps_decay >= 0, "eps_decay must be non-negative");
  require(lr > 0, "lr must be positive");
  require(sigma_noise >= 0, "sigma_noise must be non-negative");
  require(clip_c_min >= 0 && clip_c_min <= clip_c, "need 0 <= clip_c_min <= clip_c");
  require(batch_size > 0, "batch_size must be positive");
  require(batch_size <= warmup_size && warmup_size <= buffer_capacity,
          "need batch_size <= warmup_size <= buffer_capacity");
  require(updates_per_epoch >= 0, "updates_per_epoch must be non-negative");
  require(resolution > 0, "resolution must be positive");
  require(alternation_period > 0, "alternation_period must be positive");
  require(!hidden.empty(), "hidden must list at least one layer");
  for (Eigen::Index h : hidden) require(h > 0, "hidden widths must be positive");
  require(init_std > 0, "init_std must be positive");
}

DiscretizedGrid::DiscretizedGrid(Eigen::Vector2d span, double resolution) {
  if (!(resolution > 0)) throw std::invalid_argument("DiscretizedGrid: resolution must be positive");
  cpu_levels_ = centred_levels(span(0), resolution);
  mem_levels_ = centred_levels(span(1), resolution);
}

Eigen::Vector2d DiscretizedGrid::at(int index) const {
  if (index < 0 || index >= size()) throw std::out_of_range("DiscretizedGrid::at");
  const std::size_t per_row = mem_levels_.size();
  return {cpu_levels_[static_cast<std::size_t>(index) / per_row], mem_levels_[static_cast<std::size_t>(index) % per_row]};
}

int DiscretizedGrid::nearest(const Eigen::Vector2d& p) const {
  return nearest_level(cpu_levels_, p(0)) * static_cast<int>(mem_levels_.size()) + nearest_level(mem_levels_, p(1));
}

Eigen::VectorXd double_q_targets(const Eigen::VectorXd& rewards, const Eigen::MatrixXd& online_next,
                                 const Eigen::MatrixXd& target_next, double gamma) {
  if (online_next.cols() != rewards.size() || target_next.cols() != rewards.size() ||
      online_next.rows() != target_next.rows())
    throw std::invalid_argument("double_q_targets: shape mismatch");
  Eigen::VectorXd y(rewards.size());
  for (Eigen::Index i = 0; i < rewards.size(); ++i)
    y(i) = rewards(i) + gamma * target_next(argmax(online_next.col(i)), i);
  return y;
}

QLearner::QLearner(const std::vector<Eigen::Index>& dims, double lr, double init_std, Rng& rng)
    : online(dims, nn::Head::linear) {
  nn::xavier_init(online, rng, init_std);
  target = online;
  adam = nn::make_adam(online, lr);
}

double QLearner::fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXi& chosen, const Eigen::VectorXd& targets) {
  const double n = static_cast<double>(targets.size());
  nn::Tape<double> tape;
  const Eigen::MatrixXd& q = nn::forward(online, inputs, tape);
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  double loss = 0;
  for (Eigen::Index i = 0; i < q.cols(); ++i) {
    const double residual = q(chosen(i), i) - targets(i);
    grad(chosen(i), i) = 2.0 * residual / n;
    loss += residual * residual;
  }
  nn::adam_step(online, adam, nn::backward(online, tape, grad));
  return loss / n;
}

void QLearner::save(std::ostream& os) const {
  nn::write_mlp(os, online);
  nn::write_mlp(os, target);
  nn::write_adam(os, adam);
}

void QLearner::load(std::istream& is) {
  nn::Mlp<double> o = nn::read_mlp<double>(is);
  nn::Mlp<double> t = nn::read_mlp<double>(is);
  nn::AdamState<double> a = nn::read_adam<double>(is);
  if (!o.same_shape(online) || !t.same_shape(online) || a.m.size() != online.layers().size())
    throw std::runtime_error("checkpoint: Q-network shape mismatch");
  online = std::move(o);
  target = std::move(t);
  adam = std::move(a);
}

double train_server_selector(QLearner& selector, const Batch& batch, double gamma, double tau) {
  const Eigen::MatrixXd online_next = nn::forward(selector.online, batch.next_states);
  const Eigen::MatrixXd target_next = nn::forward(selector.target, batch.next_states);
  const double loss =
      selector.fit(batch.states, batch.actions, double_q_targets(batch.rewards, online_next, target_next, gamma));
  selector.soft_update(tau);
  return loss;
}

DdqnAgent::DdqnAgent(BaselineConfig config, AgentShape shape, std::uint64_t seed)
    : config_(std::move(config)),
      shape_(shape),
      rng_(make_stream(seed, "agent/ddqn")),
      buffer_(static_cast<std::size_t>(std::max(config_.buffer_capacity, 1))),
      grid_(shape.param_scale, config_.resolution),
      eps_(config_.eps) {
  config_.validate();
  if (shape_.state_size <= 0 || shape_.servers <= 0) throw std::invalid_argument("DdqnAgent: empty problem shape");
  servers_ = QLearner(layer_dims(shape_.state_size, config_.hidden, shape_.actions()), config_.lr, config_.init_std,
                      rng_);
  params_ = QLearner(layer_dims(shape_.state_size + shape_.actions(), config_.hidden, grid_.size()), config_.lr,
                     config_.init_std, rng_);
}

std::pair<sim::ParamAction, int> DdqnAgent::select(const Eigen::VectorXd& state, bool explore, const BoxFn& box_for) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  int a = 0;
  if (explore && coin(rng_) < eps_) {
    a = std::uniform_int_distribution<int>(0, shape_.cloud())(rng_);
  } else {
    a = argmax(nn::forward(servers_.online, state));
  }
  if (a == shape_.cloud()) return {{a, 0.0, 0.0}, -1};

  Eigen::VectorXd x(state.size() + shape_.actions());
  x << state, one_hot(a, shape_.actions());
  int cell = 0;
  if (explore && coin(rng_) < eps_) {
    cell = std::uniform_int_distribution<int>(0, grid_.size() - 1)(rng_);
  } else {
    cell = argmax(nn::forward(params_.online, x));
  }
  const sim::ParamBox box = box_for ? box_for(a) : static_box(shape_.param_scale);
  const Eigen::Vector2d p = clip_to_box(grid_.at(cell), box, shape_.param_scale);
  return {{a, p(0), p(1)}, cell};
}

sim::ParamAction DdqnAgent::act(const sim::DecisionPoint& point, bool explore) {
  auto [action, cell] = select(point.features, explore, [&point](int k) {
    return sim::instance_box(point.state, point.model, k, point.vnf);
  });
  if (explore) pending_cells_.push_back(cell);
  return action;
}

void DdqnAgent::observe(const sim::TransitionRecord& record) {
  Transition t;
  t.state = record.state;
  t.action_index = record.action.target;
  t.reward = -record.cost_psi;
  t.next_state = record.next_state;
  int cell = -1;
  if (!pending_cells_.empty()) {
    cell = pending_cells_.front();
    pending_cells_.pop_front();
  }
  if (record.action.target != shape_.cloud()) {
    t.params = {record.action.d_cpu, record.action.d_mem};
    t.param_index = cell >= 0 ? cell : grid_.nearest(t.params);
  }
  store(std::move(t));
}

TrainReport DdqnAgent::train_step() {
  TrainReport report;
  if (buffer_.size() < static_cast<std::size_t>(config_.warmup_size) || buffer_.empty()) return report;
  const Batch batch = buffer_.sample(static_cast<std::size_t>(config_.batch_size), rng_);

  if (server_phase()) {
    report.critic_loss = train_server_selector(servers_, batch, config_.gamma, config_.tau);
  } else {
    std::vector<Eigen::Index> placed;
    for (Eigen::Index i = 0; i < batch.size(); ++i)
      if (batch.actions(i) != shape_.cloud() && batch.param_index(i) >= 0) placed.push_back(i);
    if (!placed.empty()) {
      const Batch sub = select_columns(batch, placed);
      const Eigen::MatrixXd server_online = nn::forward(servers_.online, sub.next_states);
      const Eigen::MatrixXd server_target = nn::forward(servers_.target, sub.next_states);
      Eigen::VectorXi next_actions(sub.size());
      for (Eigen::Index i = 0; i < sub.size(); ++i) next_actions(i) = argmax(server_online.col(i));
      Eigen::MatrixXd next_x(sub.next_states.rows() + shape_.actions(), sub.size());
      next_x << sub.next_states, one_hot(next_actions, shape_.actions());
      const Eigen::MatrixXd param_online = nn::forward(params_.online, next_x);
      const Eigen::MatrixXd param_target = nn::forward(params_.target, next_x);

      Eigen::VectorXd y(sub.size());
      for (Eigen::Index i = 0; i < sub.size(); ++i) {
        // An offload continuation has no lattice; fall back to the selector's value.
        const double next_value = next_actions(i) == shape_.cloud()
                                      ? server_target(next_actions(i), i)
                                      : param_target(argmax(param_online.col(i)), i);
        y(i) = sub.rewards(i) + config_.gamma * next_value;
      }
      Eigen::MatrixXd x(sub.states.rows() + shape_.actions(), sub.size());
      x << sub.states, one_hot(sub.actions, shape_.actions());
      report.critic_loss = params_.fit(x, sub.param_index, y);
      params_.soft_update(config_.tau);
    }
  }
  ++steps_;
  eps_ = decay_linear(config_.eps, config_.eps_decay * static_cast<double>(steps_), config_.eps_min);
  report.trained = true;
  report.updates = 1;
  return report;
}

TrainReport DdqnAgent::train() {
  return repeat_updates(config_.updates_per_epoch, [this] { return train_step(); });
}

void DdqnAgent::save(std::ostream& os) const {
  const auto prec = os.precision();
  os.precision(17);
  os << "ddqn " << eps_ << ' ' << steps_ << '\n';
  os.precision(prec);
  servers_.save(os);
  params_.save(os);
}

void DdqnAgent::load(std::istream& is) {
  std::string tag;
  double eps = 0;
  long steps = 0;
  is >> tag >> eps >> steps;
  if (!is || tag != "ddqn") throw std::runtime_error("checkpoint: not a ddqn checkpoint");
  QLearner servers = servers_, params = params_;
  servers.load(is);
  params.load(is);
  servers_ = std::move(servers);
  params_ = std::move(params);
  eps_ = eps;
  steps_ = steps;
}

}  // namespace vnflab::agents

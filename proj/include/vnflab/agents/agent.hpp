#pragma once

#include "vnflab/sim/environment.hpp"

#include <functional>
#include <istream>
#include <ostream>
#include <string>

namespace vnflab::agents {

/// Problem dimensions an agent is built for.
struct AgentShape {
  Eigen::Index state_size = 0;
  int servers = 0;  // K; the action space has K + 1 entries
  Eigen::Vector2d param_scale{50, 50};

  int actions() const { return servers + 1; }
  int cloud() const { return servers; }
};

/// Feasible deltas of server k for the pending request.
using BoxFn = std::function<sim::ParamBox(int server)>;

struct Exploration {
  double eps = 0;
  double clip_c = 0;
};

struct TrainReport {
  bool trained = false;  // false when the buffer is still below warmup
  int updates = 0;
  double critic_loss = 0;
};

/// Runs `step` up to `n` times, stopping at the first untrained step, and
/// averages the reported losses.
inline TrainReport repeat_updates(int n, const std::function<TrainReport()>& step) {
  TrainReport total;
  for (int i = 0; i < n; ++i) {
    const TrainReport r = step();
    if (!r.trained) break;
    total.trained = true;
    ++total.updates;
    total.critic_loss += r.critic_loss;
  }
  if (total.updates > 0) total.critic_loss /= total.updates;
  return total;
}

/// Common callback surface of every orchestration policy.
class Agent {
 public:
  virtual ~Agent() = default;

  virtual std::string name() const = 0;
  virtual sim::ParamAction act(const sim::DecisionPoint& point, bool explore) = 0;

  virtual bool learns() const { return false; }
  virtual void observe(const sim::TransitionRecord&) {}
  /// One epoch's worth of training updates.
  virtual TrainReport train() { return {}; }
  virtual Exploration exploration() const { return {}; }

  virtual void save(std::ostream&) const {}
  virtual void load(std::istream&) {}

  sim::DecisionFn policy(bool explore) {
    return [this, explore](const sim::DecisionPoint& p) { return act(p, explore); };
  }
};

}  // namespace vnflab::agents

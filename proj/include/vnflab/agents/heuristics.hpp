#pragma once

#include "vnflab/agents/agent.hpp"
#include "vnflab/rng.hpp"

namespace vnflab::agents {

/// Minimal-resource admission: grow an existing instance of the requested VNF
/// to the lower bounds for one more user, else deploy a fresh instance at the
/// one-user lower bounds, scanning servers in ascending order; offload when
/// nothing fits.
sim::ParamAction greedy_select(const sim::AllocationState& state, const sim::SystemModel& model, int vnf);

class GreedyAgent : public Agent {
 public:
  std::string name() const override { return "greedy"; }
  /// Visits without an arriving user leave the allocation alone.
  sim::ParamAction act(const sim::DecisionPoint& point, bool explore) override;
};

/// Offloads everything.
class CloudAgent : public Agent {
 public:
  std::string name() const override { return "cloud"; }
  sim::ParamAction act(const sim::DecisionPoint& point, bool explore) override;
};

/// Uniform target, parameters uniform over the instance's feasible box.
class RandomAgent : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed) : rng_(make_stream(seed, "agent/random")) {}
  std::string name() const override { return "random"; }
  sim::ParamAction act(const sim::DecisionPoint& point, bool explore) override;

 private:
  Rng rng_;
};

}  // namespace vnflab::agents

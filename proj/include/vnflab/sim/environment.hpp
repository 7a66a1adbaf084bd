#pragma once

#include "vnflab/rng.hpp"
#include "vnflab/sim/cost_model.hpp"
#include "vnflab/sim/encoding.hpp"
#include "vnflab/sim/types.hpp"

#include <functional>
#include <string_view>
#include <vector>

namespace vnflab::sim {

/// Applies one parameterized action for a request of VNF `vnf`.
///
/// A server target resizes instance (k, vnf) by the action's deltas and, when
/// `with_user` is set, admits the user there. The deltas are infeasible when
/// they push the server outside [0, rho_max] x [0, eta_max], drive the
/// instance's resources negative, or leave users on an instance without CPU;
/// in that case nothing is resized, the user (if any) is offloaded and
/// cost_psi is +1. A cloud target places the user on the cloud row with the
/// upper-bound resources for its new user count. Dropping an instance's CPU to
/// zero tears it down and releases its memory.
///
/// Throws std::out_of_range for an unknown VNF or target.
StepOutcome apply_action(AllocationState& state, int vnf, bool with_user, const ParamAction& action,
                         const SystemModel& model, double rate);

/// Rewrites the cloud row's bookkept resources from its user counts.
void refresh_cloud_row(AllocationState& state, const std::vector<VnfSpec>& specs);

/// What an agent sees when asked for an action.
struct DecisionPoint {
  const Eigen::VectorXd& features;
  int vnf;
  bool with_user;
  const AllocationState& state;
  const SystemModel& model;
  double cloud_rate;
};

using DecisionFn = std::function<ParamAction(const DecisionPoint&)>;

struct EpochSummary {
  EpochTraffic traffic;
  std::vector<TransitionRecord> transitions;
  CostBreakdown totals;  // unweighted sums over all instances after the epoch's actions
  double network_cost = 0;
  double cpu_util = 0;
  double mem_util = 0;
  double cloud_fraction = 0;
  long active_users = 0;
  long cloud_users = 0;
  double mean_psi = 0;
  int infeasible = 0;
  long departures = 0;
  AllocationState allocation;  // post-action, pre-departure snapshot
};

/// Fraction of the pool's CPU and memory in use on the servers.
double cpu_utilization(const AllocationState& state, const SystemModel& model);
double mem_utilization(const AllocationState& state, const SystemModel& model);

/// Discrete-epoch simulator. All traffic randomness (rates, arrivals, VNF
/// visiting order, departures) comes from one generator seeded at
/// construction; departure draws follow the arrival order of users rather
/// than their placement, so every policy sees the same trace.
class Environment {
 public:
  /// `stream` names the traffic stream drawn from `seed`; distinct names give
  /// independent traces.
  Environment(SystemModel model, std::uint64_t seed, EncodingScales scales = {}, std::string_view stream = "traffic");

  const SystemModel& model() const { return model_; }
  const AllocationState& state() const { return state_; }
  const EpochTraffic& traffic() const { return traffic_; }
  long epoch() const { return traffic_.epoch; }
  Eigen::Index feature_size() const { return encoded_size(model_.servers(), model_.n_vnfs()); }

  long cumulative_arrivals() const { return cumulative_arrivals_; }
  long cumulative_departures() const { return cumulative_departures_; }

  Eigen::VectorXd encode(int vnf) const;

  /// Applies an action at the current traffic state and records the user.
  StepOutcome step(int vnf, bool with_user, const ParamAction& action);

  /// Runs one decision epoch, querying `decide` once per arriving user and
  /// once for every VNF without arrivals. Each transition's next_state is the
  /// feature vector of the following decision, so the epoch's last one already
  /// reflects departures and the next epoch's traffic.
  EpochSummary advance_epoch(const DecisionFn& decide);

 private:
  struct UserRecord {
    int row;
    int vnf;
  };

  void depart();
  // Draws the next epoch's traffic and visiting order ahead of time so the
  // closing transition of an epoch can point at the next decision.
  void prepare_epoch();

  SystemModel model_;
  EncodingScales scales_;
  Rng rng_;
  AllocationState state_;
  EpochTraffic traffic_;
  EpochTraffic upcoming_;
  std::vector<int> upcoming_order_;
  bool prepared_ = false;
  std::vector<UserRecord> roster_;
  long cumulative_arrivals_ = 0;
  long cumulative_departures_ = 0;
  long last_departures_ = 0;
};

}  // namespace vnflab::sim

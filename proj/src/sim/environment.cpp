#include "vnflab/sim/environment.hpp"

#include "vnflab/sim/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace vnflab::sim {

namespace {

constexpr double kCapacityTolerance = 1e-9;

}  // namespace

void refresh_cloud_row(AllocationState& state, const std::vector<VnfSpec>& specs) {
  const int cloud = state.cloud_row();
  for (int j = 0; j < state.vnfs(); ++j) {
    const int u = state.users(cloud, j);
    if (u > 0) {
      const ResourceRange r = resource_range(specs[static_cast<std::size_t>(j)], u);
      state.cpu(cloud, j) = r.c_up;
      state.mem(cloud, j) = r.m_up;
    } else {
      state.cpu(cloud, j) = 0.0;
      state.mem(cloud, j) = 0.0;
    }
  }
}

StepOutcome apply_action(AllocationState& state, int vnf, bool with_user, const ParamAction& action,
                         const SystemModel& model, double rate) {
  if (vnf < 0 || vnf >= state.vnfs()) throw std::out_of_range("apply_action: unknown VNF " + std::to_string(vnf));
  if (action.target < 0 || action.target > state.cloud_row())
    throw std::out_of_range("apply_action: target " + std::to_string(action.target) + " out of range");

  const int cloud = state.cloud_row();
  StepOutcome out;
  int touched = action.target;

  auto offload_user = [&] {
    touched = cloud;
    if (with_user) {
      ++state.users(cloud, vnf);
      refresh_cloud_row(state, model.vnfs);
      out.placed_row = cloud;
    }
  };

  if (action.target < cloud) {
    const int k = action.target;
    const double c_old = state.cpu(k, vnf);
    const double m_old = state.mem(k, vnf);
    double c_new = c_old + action.d_cpu;
    double m_new = m_old + action.d_mem;
    if (c_new < 0.0 && c_new > -kCapacityTolerance) c_new = 0.0;
    if (m_new < 0.0 && m_new > -kCapacityTolerance) m_new = 0.0;
    const double rho_new = state.cpu.row(k).sum() - c_old + c_new;
    const double eta_new = state.mem.row(k).sum() - m_old + m_new;
    const int users_after = state.users(k, vnf) + (with_user ? 1 : 0);

    const bool feasible = std::isfinite(c_new) && std::isfinite(m_new) && c_new >= 0.0 && m_new >= 0.0 &&
                          rho_new <= model.pool.rho_max + kCapacityTolerance &&
                          eta_new <= model.pool.eta_max + kCapacityTolerance && !(c_new == 0.0 && users_after > 0);
    if (feasible) {
      state.cpu(k, vnf) = c_new;
      state.mem(k, vnf) = c_new == 0.0 ? 0.0 : m_new;
      if (with_user) {
        ++state.users(k, vnf);
        out.placed_row = k;
      }
    } else {
      out.infeasible = true;
      offload_user();
    }
  } else {
    offload_user();
  }

  out.network_cost = network_cost(state, model.costs, model.vnfs, rate);
  out.instance_cost = instance_cost(touched, vnf, state, model.costs, model.vnfs, rate);
  out.cost_psi = out.infeasible ? 1.0
                                : agent_cost(out.instance_cost, out.network_cost, model.psi.beta, model.psi.gamma_max);
  return out;
}

double cpu_utilization(const AllocationState& state, const SystemModel& model) {
  const int k = state.servers();
  return state.cpu.topRows(k).sum() / (k * model.pool.rho_max);
}

double mem_utilization(const AllocationState& state, const SystemModel& model) {
  const int k = state.servers();
  return state.mem.topRows(k).sum() / (k * model.pool.eta_max);
}

Environment::Environment(SystemModel model, std::uint64_t seed, EncodingScales scales, std::string_view stream)
    : model_(std::move(model)),
      scales_(scales),
      rng_(make_stream(seed, stream)),
      state_(model_.servers(), model_.n_vnfs()) {
  if (model_.servers() < 1) throw std::invalid_argument("Environment: need at least one server");
  if (model_.vnfs.empty()) throw std::invalid_argument("Environment: need at least one VNF");
  traffic_.arrivals = Eigen::VectorXi::Zero(model_.n_vnfs());
  traffic_.lambdas = Eigen::VectorXd::Zero(model_.n_vnfs());
  traffic_.cloud_rate = std::max(model_.traffic.mu_r, model_.traffic.r_min);
}

Eigen::VectorXd Environment::encode(int vnf) const {
  return encode_state(state_, traffic_, vnf, model_, scales_);
}

StepOutcome Environment::step(int vnf, bool with_user, const ParamAction& action) {
  StepOutcome out = apply_action(state_, vnf, with_user, action, model_, traffic_.cloud_rate);
  if (out.placed_row >= 0) {
    roster_.push_back({out.placed_row, vnf});
    ++cumulative_arrivals_;
  }
  out.next_state_features = encode(vnf);
  return out;
}

void Environment::depart() {
  std::vector<UserRecord> kept;
  kept.reserve(roster_.size());
  long leavers = 0;
  for (const UserRecord& rec : roster_) {
    std::bernoulli_distribution stays(std::clamp(model_.vnfs[static_cast<std::size_t>(rec.vnf)].p_stay, 0.0, 1.0));
    if (stays(rng_)) {
      kept.push_back(rec);
    } else {
      --state_.users(rec.row, rec.vnf);
      ++leavers;
    }
  }
  roster_ = std::move(kept);
  refresh_cloud_row(state_, model_.vnfs);
  cumulative_departures_ += leavers;
  last_departures_ = leavers;
}

void Environment::prepare_epoch() {
  const int n = model_.n_vnfs();
  upcoming_.epoch = traffic_.epoch + 1;
  upcoming_.lambdas = traffic_.lambdas;
  if ((upcoming_.epoch - 1) % model_.traffic.t_max == 0) {
    for (int j = 0; j < n; ++j) upcoming_.lambdas(j) = sample_rate_block(model_.vnfs[static_cast<std::size_t>(j)], rng_);
  }
  upcoming_.cloud_rate = sample_cloud_rate(model_.traffic, rng_);
  upcoming_.arrivals = sample_arrivals(upcoming_.lambdas, model_.traffic.slot_T, rng_);

  upcoming_order_.resize(static_cast<std::size_t>(n));
  std::iota(upcoming_order_.begin(), upcoming_order_.end(), 0);
  std::shuffle(upcoming_order_.begin(), upcoming_order_.end(), rng_);
  prepared_ = true;
}

EpochSummary Environment::advance_epoch(const DecisionFn& decide) {
  if (!prepared_) prepare_epoch();
  traffic_ = upcoming_;
  const std::vector<int> order = upcoming_order_;
  prepared_ = false;

  EpochSummary summary;
  summary.traffic = traffic_;
  double psi_sum = 0.0;
  for (int j : order) {
    const int requests = traffic_.arrivals(j);
    const int visits = std::max(requests, 1);
    for (int i = 0; i < visits; ++i) {
      const bool with_user = requests > 0;
      Eigen::VectorXd features = encode(j);
      const DecisionPoint point{features, j, with_user, state_, model_, traffic_.cloud_rate};
      const ParamAction action = decide(point);
      StepOutcome outcome = step(j, with_user, action);
      psi_sum += outcome.cost_psi;
      summary.infeasible += outcome.infeasible ? 1 : 0;
      summary.transitions.push_back(
          {std::move(features), action, outcome.cost_psi, outcome.infeasible, {}});
    }
  }

  summary.totals = network_breakdown(state_, model_.costs, model_.vnfs, traffic_.cloud_rate);
  summary.network_cost = network_cost(state_, model_.costs, model_.vnfs, traffic_.cloud_rate);
  summary.cpu_util = cpu_utilization(state_, model_);
  summary.mem_util = mem_utilization(state_, model_);
  summary.active_users = state_.total_users();
  summary.cloud_users = state_.users.row(state_.cloud_row()).sum();
  summary.cloud_fraction =
      summary.active_users > 0 ? static_cast<double>(summary.cloud_users) / static_cast<double>(summary.active_users)
                               : 0.0;
  summary.mean_psi = summary.transitions.empty() ? 0.0 : psi_sum / static_cast<double>(summary.transitions.size());
  summary.allocation = state_;

  depart();
  summary.departures = last_departures_;
  state_.snapshot_previous();

  // A transition leads to the agent's next decision, which for the last one
  // is the opening request of the following epoch.
  prepare_epoch();
  for (std::size_t i = 0; i + 1 < summary.transitions.size(); ++i)
    summary.transitions[i].next_state = summary.transitions[i + 1].state;
  if (!summary.transitions.empty())
    summary.transitions.back().next_state = encode_state(state_, upcoming_, upcoming_order_.front(), model_, scales_);
  return summary;
}

}  // namespace vnflab::sim

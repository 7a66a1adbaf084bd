#include "vnflab/sim/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vnflab::sim {

ResourceRange resource_range(const VnfSpec& spec, double users) {
  return {spec.c0 + (spec.cr - spec.dc) * users, spec.c0 + (spec.cr + spec.dc) * users,
          spec.m0 + (spec.mr - spec.dm) * users, spec.m0 + (spec.mr + spec.dm) * users};
}

double qos(const VnfSpec& spec, double users, double cpu, double mem) {
  const ResourceRange r = resource_range(spec, users);
  if (cpu > r.c_up && mem > r.m_up) return spec.qos_max;
  if (cpu < r.c_low || mem < r.m_low) return 0.0;
  const double r_up = r.c_up + r.m_up;
  const double r_low = r.c_low + r.m_low;
  // Zero-width range: the instance sits exactly on its (collapsed) bounds.
  if (r_up <= r_low) return spec.qos_min;
  const double span = r_up - r_low;
  const double slope = (spec.qos_max - spec.qos_min) / span;
  const double offset = (spec.qos_min * r_up - spec.qos_max * r_low) / span;
  return slope * (std::min(mem, r.m_up) + std::min(cpu, r.c_up)) + offset;
}

double resize_latency(const CostParams& costs, double c_new, double c_old, double m_new, double m_old) {
  return std::abs(c_new - c_old) * costs.d_rc + std::abs(m_new - m_old) * costs.d_rm;
}

double deployment_latency(const CostParams& costs, double c_old, double c_new) {
  return (c_old == 0.0 && c_new > 0.0) ? costs.d_db : 0.0;
}

double offload_latency(const CostParams& costs, double m_up_cloud, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("offload_latency: cloud rate must be positive");
  return 2.0 * m_up_cloud * costs.unit_b / rate;
}

namespace {

void check_index(int k, int j, const AllocationState& state) {
  if (k < 0 || k > state.cloud_row() || j < 0 || j >= state.vnfs())
    throw std::out_of_range("instance index (" + std::to_string(k) + ", " + std::to_string(j) + ") out of range");
}

}  // namespace

double instance_qos(int k, int j, const AllocationState& state, const std::vector<VnfSpec>& specs) {
  check_index(k, j, state);
  const int u = state.users(k, j);
  if (u <= 0) return 0.0;
  if (k == state.cloud_row()) return specs[static_cast<std::size_t>(j)].qos_max;
  return qos(specs[static_cast<std::size_t>(j)], u, state.cpu(k, j), state.mem(k, j));
}

double instance_latency(int k, int j, const AllocationState& state, const CostParams& costs, double rate) {
  check_index(k, j, state);
  const double u = state.users(k, j);
  if (u <= 0) return 0.0;
  if (k == state.cloud_row()) return u * offload_latency(costs, state.mem(k, j), rate);
  return u * (deployment_latency(costs, state.cpu_prev(k, j), state.cpu(k, j)) +
              resize_latency(costs, state.cpu(k, j), state.cpu_prev(k, j), state.mem(k, j), state.mem_prev(k, j)));
}

double instance_financial(int k, int j, const AllocationState& state, const CostParams& costs, int n_vnfs) {
  check_index(k, j, state);
  if (!state.deployed(k, j)) return 0.0;
  const double u_eff = std::max(state.users(k, j), 1);
  if (k == state.cloud_row()) {
    const bool newly_offloaded = state.cpu_prev(k, j) == 0.0 && state.cpu(k, j) > 0.0;
    return u_eff * ((newly_offloaded ? costs.c_c0 : 0.0) + state.mem(k, j) * costs.c_cv);
  }
  const bool active = state.server_active(k);
  const bool newly_active = active && !state.server_active_prev[static_cast<std::size_t>(k)];
  const double n = static_cast<double>(n_vnfs);
  const double server_share = (newly_active ? costs.c_i0 / n : 0.0) + (active ? costs.c_iv / n : 0.0);
  return u_eff * (state.cpu(k, j) * costs.c_rp + state.mem(k, j) * costs.c_rm + server_share);
}

double sla_cost(const VnfSpec& spec, double qos_value, double users) {
  if (users <= 0) return 0.0;
  return (spec.gamma_sla * (qos_value < spec.qos_min ? 1.0 : 0.0) - qos_value) * users;
}

CostBreakdown instance_breakdown(int k, int j, const AllocationState& state, const CostParams& costs,
                                 const std::vector<VnfSpec>& specs, double rate) {
  CostBreakdown b;
  b.users = state.users(k, j);
  b.latency = instance_latency(k, j, state, costs, rate);
  b.financial = instance_financial(k, j, state, costs, state.vnfs());
  b.sla = sla_cost(specs[static_cast<std::size_t>(j)], instance_qos(k, j, state, specs), b.users);
  return b;
}

double instance_cost(int k, int j, const AllocationState& state, const CostParams& costs,
                     const std::vector<VnfSpec>& specs, double rate) {
  const CostBreakdown b = instance_breakdown(k, j, state, costs, specs, rate);
  return b.weighted(costs) / std::max(b.users, 1);
}

CostBreakdown network_breakdown(const AllocationState& state, const CostParams& costs,
                                const std::vector<VnfSpec>& specs, double rate) {
  CostBreakdown total;
  for (int k = 0; k <= state.cloud_row(); ++k) {
    for (int j = 0; j < state.vnfs(); ++j) {
      const CostBreakdown b = instance_breakdown(k, j, state, costs, specs, rate);
      total.latency += b.latency;
      total.financial += b.financial;
      total.sla += b.sla;
      total.users += b.users;
    }
  }
  return total;
}

double network_cost(const AllocationState& state, const CostParams& costs, const std::vector<VnfSpec>& specs,
                    double rate) {
  double numerator = 0.0;
  long users = 0;
  for (int k = 0; k <= state.cloud_row(); ++k) {
    for (int j = 0; j < state.vnfs(); ++j) {
      const CostBreakdown b = instance_breakdown(k, j, state, costs, specs, rate);
      numerator += b.weighted(costs);
      users += b.users;
    }
  }
  return numerator / static_cast<double>(std::max(users, 1L));
}

double agent_cost(double instance_cost, double network_cost, double beta, double gamma_max) {
  if (!(gamma_max > 0.0)) throw std::invalid_argument("agent_cost: gamma_max must be positive");
  return std::clamp((instance_cost + beta * network_cost) / gamma_max, -1.0, 1.0);
}

}  // namespace vnflab::sim

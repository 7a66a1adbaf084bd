#pragma once

// Elastic QoS and the latency / financial / SLA cost model. Row index k is
// zero-based; k == state.cloud_row() designates the cloud.

#include "vnflab/sim/types.hpp"

namespace vnflab::sim {

struct ResourceRange {
  double c_low = 0, c_up = 0;
  double m_low = 0, m_up = 0;
};

/// Resource range within which an instance serving `users` users operates.
ResourceRange resource_range(const VnfSpec& spec, double users);

/// Piecewise-linear QoS of an instance with `users >= 1` users holding
/// (cpu, mem). Saturates at qos_max above the upper bounds and drops to
/// zero below either lower bound.
double qos(const VnfSpec& spec, double users, double cpu, double mem);

double resize_latency(const CostParams& costs, double c_new, double c_old, double m_new, double m_old);
double deployment_latency(const CostParams& costs, double c_old, double c_new);
double offload_latency(const CostParams& costs, double m_up_cloud, double rate);

/// Per-instance cost components before weighting.
struct CostBreakdown {
  double latency = 0;
  double financial = 0;
  double sla = 0;
  int users = 0;

  double weighted(const CostParams& c) const { return c.w1 * latency + c.w2 * financial + c.w3 * sla; }
};

/// QoS perceived by the users of instance (k, j); qos_max on the cloud.
double instance_qos(int k, int j, const AllocationState& state, const std::vector<VnfSpec>& specs);

double instance_latency(int k, int j, const AllocationState& state, const CostParams& costs, double rate);
double instance_financial(int k, int j, const AllocationState& state, const CostParams& costs, int n_vnfs);
double sla_cost(const VnfSpec& spec, double qos_value, double users);

CostBreakdown instance_breakdown(int k, int j, const AllocationState& state, const CostParams& costs,
                                 const std::vector<VnfSpec>& specs, double rate);

/// Weighted instance cost normalized per user (guarded for idle instances).
double instance_cost(int k, int j, const AllocationState& state, const CostParams& costs,
                     const std::vector<VnfSpec>& specs, double rate);

/// Weighted cost of every instance normalized by the total user count.
double network_cost(const AllocationState& state, const CostParams& costs, const std::vector<VnfSpec>& specs,
                    double rate);

/// Sum of the unweighted components over all instances.
CostBreakdown network_breakdown(const AllocationState& state, const CostParams& costs,
                                const std::vector<VnfSpec>& specs, double rate);

/// Learner cost Psi, clipped to [-1, 1].
double agent_cost(double instance_cost, double network_cost, double beta, double gamma_max);

}  // namespace vnflab::sim

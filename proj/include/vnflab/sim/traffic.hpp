#pragma once

#include "vnflab/rng.hpp"
#include "vnflab/sim/types.hpp"

namespace vnflab::sim {

/// Arrival rate for one block of t_max epochs: max(x, 0), x ~ N(mu, sigma).
double sample_rate_block(const VnfSpec& spec, Rng& rng);

/// Independent Poisson(lambda_j * T) arrival counts.
Eigen::VectorXi sample_arrivals(const Eigen::VectorXd& lambdas, double slot_T, Rng& rng);

/// Cloud link rate max(x, r_min), x ~ N(mu_r, sigma_r).
double sample_cloud_rate(const TrafficConfig& cfg, Rng& rng);

/// Each user independently stays with its VNF's p_stay. Decrements
/// `state.users` and returns the leavers per (row, VNF).
Eigen::MatrixXi apply_departures(AllocationState& state, const std::vector<VnfSpec>& specs, Rng& rng);

}  // namespace vnflab::sim

#pragma once

#include "vnflab/sim/types.hpp"

namespace vnflab::sim {

/// Divisors applied to count-valued features.
struct EncodingScales {
  double arrivals = 10.0;
  double users = 10.0;
};

/// Length of the feature vector for K servers and N VNFs:
/// arrivals (N), deployed flags (N), users ((K+1)N), CPU (KN), memory (KN),
/// cloud rate (1), requested-VNF one-hot (N).
Eigen::Index encoded_size(int servers, int vnfs);

Eigen::VectorXd encode_state(const AllocationState& state, const EpochTraffic& traffic, int requested_vnf,
                             const SystemModel& model, const EncodingScales& scales = {});

/// Deltas keeping server k within capacity (the cloud has no parameters).
ParamBox feasible_box(const AllocationState& state, const SystemModel& model, int server);

/// feasible_box tightened so instance (server, vnf) cannot go negative.
ParamBox instance_box(const AllocationState& state, const SystemModel& model, int server, int vnf);

}  // namespace vnflab::sim

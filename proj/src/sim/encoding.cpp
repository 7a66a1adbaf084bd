#include "vnflab/sim/encoding.hpp"

#include <algorithm>
#include <stdexcept>

namespace vnflab::sim {

Eigen::Index encoded_size(int servers, int vnfs) {
  const Eigen::Index k = servers, n = vnfs;
  return n + n + (k + 1) * n + k * n + k * n + 1 + n;
}

Eigen::VectorXd encode_state(const AllocationState& state, const EpochTraffic& traffic, int requested_vnf,
                             const SystemModel& model, const EncodingScales& scales) {
  const int k_servers = state.servers();
  const int n = state.vnfs();
  if (requested_vnf < 0 || requested_vnf >= n) throw std::out_of_range("encode_state: unknown VNF");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(encoded_size(k_servers, n));
  Eigen::Index at = 0;

  if (traffic.arrivals.size() == n) x.segment(at, n) = traffic.arrivals.cast<double>() / scales.arrivals;
  at += n;
  for (int j = 0; j < n; ++j) {
    bool deployed = false;
    for (int k = 0; k <= k_servers && !deployed; ++k) deployed = state.deployed(k, j);
    x(at + j) = deployed ? 1.0 : 0.0;
  }
  at += n;
  // Row-major flattening: server 0's VNFs first.
  for (int k = 0; k <= k_servers; ++k)
    for (int j = 0; j < n; ++j) x(at++) = state.users(k, j) / scales.users;
  for (int k = 0; k < k_servers; ++k)
    for (int j = 0; j < n; ++j) x(at++) = state.cpu(k, j) / model.pool.rho_max;
  for (int k = 0; k < k_servers; ++k)
    for (int j = 0; j < n; ++j) x(at++) = state.mem(k, j) / model.pool.eta_max;
  x(at++) = traffic.cloud_rate / std::max(model.traffic.mu_r, model.traffic.r_min);
  x(at + requested_vnf) = 1.0;
  return x;
}

ParamBox feasible_box(const AllocationState& state, const SystemModel& model, int server) {
  if (server < 0 || server >= state.servers()) return {};
  const double rho = state.cpu.row(server).sum();
  const double eta = state.mem.row(server).sum();
  return {-rho, model.pool.rho_max - rho, -eta, model.pool.eta_max - eta};
}

ParamBox instance_box(const AllocationState& state, const SystemModel& model, int server, int vnf) {
  ParamBox box = feasible_box(state, model, server);
  if (server < 0 || server >= state.servers() || vnf < 0 || vnf >= state.vnfs()) return box;
  box.cpu_lo = std::max(box.cpu_lo, -state.cpu(server, vnf));
  box.mem_lo = std::max(box.mem_lo, -state.mem(server, vnf));
  return box;
}

}  // namespace vnflab::sim

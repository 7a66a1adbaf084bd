#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace vnflab::sim {

/// Elastic resource profile and traffic statistics of one VNF.
struct VnfSpec {
  int id = 0;
  double c0 = 0, cr = 0, dc = 0;  // CPU offset, per-user slope, elastic coefficient
  double m0 = 0, mr = 0, dm = 0;  // memory offset, per-user slope, elastic coefficient
  double qos_min = 0, qos_max = 0;
  double gamma_sla = 0;            // SLA violation penalty
  double mu_arr = 0, sigma_arr = 0;  // arrival-rate Gaussian
  double p_stay = 0.5;             // per-slot probability a user stays

  friend bool operator==(const VnfSpec&, const VnfSpec&) = default;
};

struct CostParams {
  double d_rc = 3, d_rm = 4;  // resize latency per CPU / memory unit
  double d_db = 20;           // container boot delay
  double d_dt = 10;           // listed with the delays but used by no cost term
  double c_rp = 6, c_rm = 3;  // per-unit CPU / memory rental
  double c_i0 = 2, c_iv = 1;  // server power-on and per-epoch rental
  double c_c0 = 1, c_cv = 3;  // cloud one-time and per-epoch rental
  double w1 = 1, w2 = 1, w3 = 2;  // latency, financial, SLA weights
  double unit_b = 1, unit_c = 1;

  friend bool operator==(const CostParams&, const CostParams&) = default;
};

struct PoolConfig {
  int k_servers = 10;
  double rho_max = 50;
  double eta_max = 50;
  int n_vnfs = 10;

  friend bool operator==(const PoolConfig&, const PoolConfig&) = default;
};

struct TrafficConfig {
  int t_max = 100;  // epochs per arrival-rate block
  double mu_r = 10, sigma_r = 2;
  double r_min = 1;
  double slot_T = 1;

  friend bool operator==(const TrafficConfig&, const TrafficConfig&) = default;
};

/// Normalization of instance and network costs into the learner's cost Psi.
struct PsiParams {
  double beta = 0.2;
  double gamma_max = 100;

  friend bool operator==(const PsiParams&, const PsiParams&) = default;
};

/// Everything the cost model and environment need to know about the system.
struct SystemModel {
  PoolConfig pool;
  std::vector<VnfSpec> vnfs;
  CostParams costs;
  TrafficConfig traffic;
  PsiParams psi;

  int servers() const { return pool.k_servers; }
  int n_vnfs() const { return static_cast<int>(vnfs.size()); }
  int cloud_row() const { return pool.k_servers; }
};

/// Allocation matrices over (servers + cloud) x VNFs. Row `servers()` is the
/// cloud, whose cpu/mem entries record the guaranteed upper-bound resources
/// of the offloaded instance.
struct AllocationState {
  Eigen::MatrixXd cpu;
  Eigen::MatrixXd mem;
  Eigen::MatrixXi users;
  Eigen::MatrixXd cpu_prev;
  Eigen::MatrixXd mem_prev;
  std::vector<bool> server_active_prev;

  AllocationState() = default;
  AllocationState(int servers, int vnfs)
      : cpu(Eigen::MatrixXd::Zero(servers + 1, vnfs)),
        mem(Eigen::MatrixXd::Zero(servers + 1, vnfs)),
        users(Eigen::MatrixXi::Zero(servers + 1, vnfs)),
        cpu_prev(Eigen::MatrixXd::Zero(servers + 1, vnfs)),
        mem_prev(Eigen::MatrixXd::Zero(servers + 1, vnfs)),
        server_active_prev(static_cast<std::size_t>(servers), false) {}

  int servers() const { return static_cast<int>(cpu.rows()) - 1; }
  int vnfs() const { return static_cast<int>(cpu.cols()); }
  int cloud_row() const { return servers(); }

  bool deployed(int k, int j) const {
    return k == cloud_row() ? users(k, j) > 0 : cpu(k, j) > 0.0;
  }
  bool server_active(int k) const { return cpu.row(k).sum() > 0.0; }
  long total_users() const { return users.sum(); }

  /// Copies the current allocation into the previous-epoch slots.
  void snapshot_previous() {
    cpu_prev = cpu;
    mem_prev = mem;
    for (int k = 0; k < servers(); ++k) server_active_prev[static_cast<std::size_t>(k)] = server_active(k);
  }

  friend bool operator==(const AllocationState&, const AllocationState&) = default;
};

struct EpochTraffic {
  long epoch = 0;
  Eigen::VectorXi arrivals;
  Eigen::VectorXd lambdas;
  double cloud_rate = 0;
};

/// A parameterized action. `target` is zero-based: 0..K-1 are servers and
/// K is the cloud (offload), which carries no parameters.
struct ParamAction {
  int target = 0;
  double d_cpu = 0;
  double d_mem = 0;

  friend bool operator==(const ParamAction&, const ParamAction&) = default;
};

/// Feasible parameter ranges for one server: deltas keep the server's totals
/// inside [0, rho_max] x [0, eta_max].
struct ParamBox {
  double cpu_lo = 0, cpu_hi = 0;
  double mem_lo = 0, mem_hi = 0;
};

struct StepOutcome {
  double cost_psi = 0;
  bool infeasible = false;
  double instance_cost = 0;
  double network_cost = 0;
  int placed_row = -1;  // row the user landed on, -1 when no user was assigned
  Eigen::VectorXd next_state_features;
};

/// One decision as recorded by the environment.
struct TransitionRecord {
  Eigen::VectorXd state;
  ParamAction action;
  double cost_psi = 0;
  bool infeasible = false;
  Eigen::VectorXd next_state;
};

}  // namespace vnflab::sim

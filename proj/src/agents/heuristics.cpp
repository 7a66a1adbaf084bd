#include "vnflab/agents/heuristics.hpp"

#include "vnflab/sim/cost_model.hpp"
#include "vnflab/sim/encoding.hpp"

#include <random>

namespace vnflab::agents {

namespace {

constexpr double kFitTolerance = 1e-9;

}  // namespace

sim::ParamAction greedy_select(const sim::AllocationState& state, const sim::SystemModel& model, int vnf) {
  const sim::VnfSpec& spec = model.vnfs.at(static_cast<std::size_t>(vnf));
  const int servers = state.servers();
  auto fits = [&](int k, double d_cpu, double d_mem) {
    return state.cpu.row(k).sum() + d_cpu <= model.pool.rho_max + kFitTolerance &&
           state.mem.row(k).sum() + d_mem <= model.pool.eta_max + kFitTolerance;
  };

  for (int k = 0; k < servers; ++k) {
    if (!state.deployed(k, vnf)) continue;
    const sim::ResourceRange r = sim::resource_range(spec, state.users(k, vnf) + 1);
    const double d_cpu = r.c_low - state.cpu(k, vnf);
    const double d_mem = r.m_low - state.mem(k, vnf);
    if (fits(k, d_cpu, d_mem)) return {k, d_cpu, d_mem};
  }
  const sim::ResourceRange fresh = sim::resource_range(spec, 1);
  for (int k = 0; k < servers; ++k) {
    if (state.deployed(k, vnf)) continue;
    if (fits(k, fresh.c_low, fresh.m_low)) return {k, fresh.c_low, fresh.m_low};
  }
  return {state.cloud_row(), 0.0, 0.0};
}

sim::ParamAction GreedyAgent::act(const sim::DecisionPoint& point, bool) {
  if (!point.with_user) return {point.state.cloud_row(), 0.0, 0.0};
  return greedy_select(point.state, point.model, point.vnf);
}

sim::ParamAction CloudAgent::act(const sim::DecisionPoint& point, bool) {
  return {point.state.cloud_row(), 0.0, 0.0};
}

sim::ParamAction RandomAgent::act(const sim::DecisionPoint& point, bool) {
  const int target = std::uniform_int_distribution<int>(0, point.state.cloud_row())(rng_);
  if (target == point.state.cloud_row()) return {target, 0.0, 0.0};
  const sim::ParamBox box = sim::instance_box(point.state, point.model, target, point.vnf);
  auto uniform = [this](double lo, double hi) {
    return hi > lo ? std::uniform_real_distribution<double>(lo, hi)(rng_) : lo;
  };
  const double d_cpu = uniform(box.cpu_lo, box.cpu_hi);
  const double d_mem = uniform(box.mem_lo, box.mem_hi);
  return {target, d_cpu, d_mem};
}

}  // namespace vnflab::agents

#include "vnflab/agents/ddpg.hpp"
#include "vnflab/agents/ddqn.hpp"
#include "vnflab/agents/heuristics.hpp"
#include "vnflab/agents/learning.hpp"
#include "vnflab/bench/config.hpp"

#include <gtest/gtest.h>

#include <map>
#include <sstream>

using namespace vnflab;
using namespace vnflab::agents;

namespace {

sim::SystemModel model(int servers, int vnfs) { return bench::scaled_config(servers, vnfs).model(); }

AgentShape shape_for(const sim::SystemModel& m) {
  AgentShape s;
  s.state_size = sim::encoded_size(m.servers(), m.n_vnfs());
  s.servers = m.servers();
  return s;
}

BaselineConfig tiny_config() {
  BaselineConfig c;
  c.hidden = {16, 8};
  c.batch_size = 4;
  c.warmup_size = 8;
  c.buffer_capacity = 64;
  c.alternation_period = 3;
  return c;
}

AgentShape tiny_shape() {
  AgentShape s;
  s.state_size = 4;
  s.servers = 2;
  return s;
}

Transition random_transition(std::mt19937_64& g, int actions) {
  std::normal_distribution<double> n(0.0, 1.0);
  Transition t;
  t.state = Eigen::VectorXd::NullaryExpr(4, [&] { return n(g); });
  t.next_state = Eigen::VectorXd::NullaryExpr(4, [&] { return n(g); });
  t.action_index = std::uniform_int_distribution<int>(0, actions - 1)(g);
  t.params = {10 * n(g), 10 * n(g)};
  t.param_index = std::uniform_int_distribution<int>(0, 99)(g);
  t.reward = std::tanh(n(g));
  return t;
}

}  // namespace

TEST(Greedy, GrowsExistingInstanceToNextLowerBound) {
  const sim::SystemModel m = model(2, 1);
  sim::AllocationState s(2, 1);
  s.cpu(0, 0) = 4;
  s.mem(0, 0) = 8;
  s.users(0, 0) = 1;
  EXPECT_EQ(greedy_select(s, m, 0), (sim::ParamAction{0, 1, 2}));
}

TEST(Greedy, DeploysOnFirstServerOfEmptyPool) {
  const sim::SystemModel m = model(2, 1);
  sim::AllocationState s(2, 1);
  EXPECT_EQ(greedy_select(s, m, 0), (sim::ParamAction{0, 4, 8}));
}

TEST(Greedy, SkipsFullServersThenOffloads) {
  const sim::SystemModel m = model(2, 2);
  sim::AllocationState s(2, 2);
  s.cpu(0, 1) = 48;
  s.mem(0, 1) = 10;
  s.users(0, 1) = 3;
  EXPECT_EQ(greedy_select(s, m, 0), (sim::ParamAction{1, 4, 8}));
  s.cpu(1, 1) = 10;
  s.mem(1, 1) = 45;
  s.users(1, 1) = 3;
  EXPECT_EQ(greedy_select(s, m, 0), (sim::ParamAction{2, 0, 0}));
}

TEST(Greedy, NeverOverfillsAndMeetsQualityFloor) {
  const sim::SystemModel m = model(2, 3);
  sim::Environment env(m, 3);
  GreedyAgent greedy;
  for (int e = 0; e < 300; ++e) {
    const sim::EpochSummary s = env.advance_epoch(greedy.policy(false));
    EXPECT_EQ(s.infeasible, 0);
    const sim::AllocationState& a = s.allocation;
    for (int k = 0; k < 2; ++k) {
      EXPECT_LE(a.cpu.row(k).sum(), m.pool.rho_max + 1e-9);
      for (int j = 0; j < 3; ++j)
        if (a.users(k, j) > 0)
          EXPECT_GE(sim::instance_qos(k, j, a, m.vnfs), m.vnfs[static_cast<std::size_t>(j)].qos_min - 1e-9);
    }
  }
}

TEST(Cloud, OffloadsEverything) {
  const sim::SystemModel m = model(2, 3);
  sim::Environment env(m, 4);
  CloudAgent cloud;
  for (int e = 0; e < 100; ++e) {
    const sim::EpochSummary s = env.advance_epoch(cloud.policy(true));
    for (const sim::TransitionRecord& t : s.transitions) EXPECT_EQ(t.action, (sim::ParamAction{2, 0, 0}));
    if (s.active_users > 0) EXPECT_DOUBLE_EQ(s.cloud_fraction, 1.0);
    EXPECT_DOUBLE_EQ(s.cpu_util, 0.0);
  }
}

TEST(Random, StaysInsideInstanceBox) {
  const sim::SystemModel m = model(2, 3);
  sim::Environment env(m, 5);
  RandomAgent agent(5);
  std::vector<int> targets(3, 0);
  for (int e = 0; e < 200; ++e) {
    const sim::EpochSummary s = env.advance_epoch([&](const sim::DecisionPoint& p) {
      const sim::ParamAction a = agent.act(p, true);
      ++targets[static_cast<std::size_t>(a.target)];
      if (a.target < 2) {
        const sim::ParamBox b = sim::instance_box(p.state, p.model, a.target, p.vnf);
        EXPECT_GE(a.d_cpu, b.cpu_lo);
        EXPECT_LE(a.d_cpu, b.cpu_hi);
        EXPECT_GE(a.d_mem, b.mem_lo);
        EXPECT_LE(a.d_mem, b.mem_hi);
      }
      return a;
    });
    (void)s;
  }
  for (int n : targets) EXPECT_GT(n, 0);
}

TEST(Grid, CellCentredLattice) {
  const DiscretizedGrid g({50, 50}, 5);
  EXPECT_EQ(g.size(), 100);
  EXPECT_DOUBLE_EQ(g.cpu_levels().front(), -22.5);
  EXPECT_DOUBLE_EQ(g.cpu_levels().back(), 22.5);
  EXPECT_EQ(g.at(0), Eigen::Vector2d(-22.5, -22.5));
  EXPECT_EQ(g.at(1), Eigen::Vector2d(-22.5, -17.5));
  for (int i = 0; i < g.size(); ++i) EXPECT_EQ(g.nearest(g.at(i)), i);
  EXPECT_EQ(g.nearest({100, -100}), 90);
  EXPECT_THROW(g.at(100), std::out_of_range);
}

TEST(DoubleQ, OnlineChoosesTargetEvaluates) {
  Eigen::VectorXd r(2);
  r << 0.5, -0.5;
  Eigen::MatrixXd online(2, 2), target(2, 2);
  online << 1, 3,
            2, 0;
  target << 10, 30,
            20, 40;
  const Eigen::VectorXd y = double_q_targets(r, online, target, 0.9);
  EXPECT_DOUBLE_EQ(y(0), 0.5 + 0.9 * 20);
  EXPECT_DOUBLE_EQ(y(1), -0.5 + 0.9 * 30);
}

TEST(Ddqn, FullExplorationIsUniformOverLattice) {
  BaselineConfig c = tiny_config();
  c.eps = 1.0;
  DdqnAgent agent(c, tiny_shape(), 6);
  const Eigen::VectorXd s = Eigen::VectorXd::Ones(4);
  std::map<int, long> cells;
  long placed = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto [action, cell] = agent.select(s, true);
    if (cell < 0) continue;
    ++cells[cell];
    ++placed;
  }
  ASSERT_EQ(static_cast<int>(cells.size()), 100);
  double chi2 = 0;
  const double expected = static_cast<double>(placed) / 100;
  for (const auto& [cell, n] : cells) {
    chi2 += (n - expected) * (n - expected) / expected;
    EXPECT_NEAR(static_cast<double>(n) / placed, 0.01, 0.02 * 0.1);
  }
  // 99.9th percentile of chi-square with 99 degrees of freedom
  EXPECT_LT(chi2, 148.2);
}

TEST(Ddqn, AlternatesPhasesAndDecaysExploration) {
  DdqnAgent agent(tiny_config(), tiny_shape(), 7);
  std::mt19937_64 g(8);
  for (int i = 0; i < 16; ++i) agent.store(random_transition(g, 3));
  for (int step = 0; step < 12; ++step) {
    const QLearner servers = agent.servers();
    const QLearner params = agent.params();
    const bool server_phase = agent.server_phase();
    ASSERT_TRUE(agent.train_step().trained);
    EXPECT_EQ(server_phase, (step / 3) % 2 == 0);
    EXPECT_EQ(agent.servers().online == servers.online, !server_phase);
    EXPECT_EQ(agent.params().online == params.online, server_phase);
  }
  EXPECT_EQ(agent.eps(), 0.8 - 12 * 1e-3);
}

TEST(Ddqn, CheckpointRoundTrip) {
  DdqnAgent a(tiny_config(), tiny_shape(), 9);
  std::mt19937_64 g(10);
  for (int i = 0; i < 16; ++i) a.store(random_transition(g, 3));
  for (int i = 0; i < 8; ++i) a.train_step();
  std::stringstream buf;
  a.save(buf);
  DdqnAgent b(tiny_config(), tiny_shape(), 11);
  b.load(buf);
  EXPECT_TRUE(a.servers().online == b.servers().online);
  EXPECT_TRUE(a.params().target == b.params().target);
  EXPECT_EQ(a.eps(), b.eps());
}

TEST(Ddpg, SingleCriticTarget) {
  DdpgAgent agent(tiny_config(), tiny_shape(), 12);
  agent.critic().layers().back().bias(0) = 0.25;
  std::mt19937_64 g(13);
  std::vector<Transition> items;
  for (int i = 0; i < 6; ++i) items.push_back(random_transition(g, 3));
  std::vector<const Transition*> ptrs;
  for (const auto& t : items) ptrs.push_back(&t);
  const Batch b = make_batch(ptrs);
  const SingleCriticTargets t = agent.compute_targets(b);
  for (Eigen::Index i = 0; i < b.size(); ++i) EXPECT_DOUBLE_EQ(t.y(i), b.rewards(i) + 0.99 * t.q(i));
  // the target critic is still the initial copy, not the edited live one
  EXPECT_FALSE(agent.target_critic() == agent.critic());
}

TEST(Ddpg, OutputsRespectScale) {
  BaselineConfig c = tiny_config();
  c.init_std = 5.0;
  DdpgAgent agent(c, tiny_shape(), 14);
  std::mt19937_64 g(15);
  std::normal_distribution<double> n(0.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    const Eigen::VectorXd s = Eigen::VectorXd::NullaryExpr(4, [&] { return n(g); });
    const sim::ParamAction a = agent.select_action(s, true);
    EXPECT_LE(std::abs(a.d_cpu), 50.0);
    EXPECT_LE(std::abs(a.d_mem), 50.0);
  }
}

TEST(Ddpg, QuadraticCriticPullsParameterToOptimum) {
  BaselineConfig c = tiny_config();
  c.hidden = {4};
  c.lr = 1e-2;
  DdpgAgent agent(c, tiny_shape(), 16);
  const Eigen::Index d = 4, a = 3;
  nn::Mlp<double>& q = agent.critic();
  for (auto& l : q.layers()) {
    l.weight.setZero();
    l.bias.setZero();
  }
  q.layers()[0].weight(0, d + a) = 1.0;
  q.layers()[0].bias(0) = -3.0 / 50;
  q.layers()[0].weight(1, d + a) = -1.0;
  q.layers()[0].bias(1) = 3.0 / 50;
  q.layers()[1].weight(0, 0) = -1.0;
  q.layers()[1].weight(0, 1) = -1.0;

  std::mt19937_64 g(17);
  std::vector<Transition> items;
  for (int i = 0; i < 8; ++i) items.push_back(random_transition(g, 2));
  std::vector<const Transition*> ptrs;
  for (const auto& t : items) ptrs.push_back(&t);
  const Batch b = make_batch(ptrs);
  for (int i = 0; i < 3000; ++i) agent.update_actor(b);

  Eigen::MatrixXd x(d + a, b.size());
  x << b.states, one_hot(b.actions, a);
  EXPECT_NEAR(nn::forward(agent.actor(), x).row(0).mean(), 3.0, 0.5);
}

TEST(Ddpg, CheckpointRoundTrip) {
  DdpgAgent a(tiny_config(), tiny_shape(), 18);
  std::mt19937_64 g(19);
  for (int i = 0; i < 16; ++i) a.store(random_transition(g, 3));
  for (int i = 0; i < 8; ++i) a.train_step();
  std::stringstream buf;
  a.save(buf);
  DdpgAgent b(tiny_config(), tiny_shape(), 20);
  b.load(buf);
  EXPECT_TRUE(a.actor() == b.actor());
  EXPECT_TRUE(a.target_critic() == b.target_critic());
  EXPECT_EQ(a.clip_c(), b.clip_c());
}

TEST(Baselines, RunOnTheEnvironmentCallback) {
  const sim::SystemModel m = model(2, 2);
  BaselineConfig c = tiny_config();
  std::vector<std::unique_ptr<Agent>> agents;
  agents.push_back(std::make_unique<DdqnAgent>(c, shape_for(m), 1));
  agents.push_back(std::make_unique<DdpgAgent>(c, shape_for(m), 1));
  for (auto& agent : agents) {
    sim::Environment env(m, 21);
    for (int e = 0; e < 30; ++e) {
      const sim::EpochSummary s = env.advance_epoch(agent->policy(true));
      for (const auto& t : s.transitions) agent->observe(t);
      agent->train();
    }
    EXPECT_LT(agent->exploration().eps, 0.8) << agent->name();
  }
}

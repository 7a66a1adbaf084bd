#include "vnflab/bench/config.hpp"
#include "vnflab/sim/encoding.hpp"
#include "vnflab/sim/environment.hpp"
#include "vnflab/sim/traffic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace vnflab;
using namespace vnflab::sim;

namespace {

// E[max(x, floor)] for x ~ N(mu, sigma)
double truncated_mean(double mu, double sigma, double floor) {
  const double z = (floor - mu) / sigma;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
  return floor * cdf + mu * (1 - cdf) + sigma * pdf;
}

SystemModel model(int servers, int vnfs) { return bench::scaled_config(servers, vnfs).model(); }

ParamAction offload_all(const DecisionPoint& p) { return {p.state.cloud_row(), 0, 0}; }

}  // namespace

TEST(Traffic, RateBlock) {
  Rng rng(1);
  VnfSpec s;
  s.mu_arr = 2;
  s.sigma_arr = 0;
  EXPECT_DOUBLE_EQ(sample_rate_block(s, rng), 2);
  s.mu_arr = -5;
  EXPECT_DOUBLE_EQ(sample_rate_block(s, rng), 0);

  s.mu_arr = 2;
  s.sigma_arr = 1.5;
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += sample_rate_block(s, rng);
  const double want = truncated_mean(2, 1.5, 0);
  EXPECT_NEAR(sum / n, want, 0.02 * want);
}

TEST(Traffic, PoissonArrivals) {
  Rng rng(2);
  Eigen::VectorXd lambdas(2);
  lambdas << 0.0, 2.5;
  const int n = 100000;
  long total = 0, zeros = 0;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXi a = sample_arrivals(lambdas, 1.0, rng);
    ASSERT_EQ(a(0), 0);
    total += a(1);
    zeros += a(1) == 0;
  }
  EXPECT_NEAR(static_cast<double>(total) / n, 2.5, 0.02 * 2.5);
  const double p0 = std::exp(-2.5);
  EXPECT_NEAR(static_cast<double>(zeros) / n, p0, 0.05 * p0);
}

TEST(Traffic, CloudRate) {
  Rng rng(3);
  TrafficConfig t;
  t.sigma_r = 0;
  EXPECT_DOUBLE_EQ(sample_cloud_rate(t, rng), 10);
  t.mu_r = 0;
  EXPECT_DOUBLE_EQ(sample_cloud_rate(t, rng), 1);

  t.mu_r = 10;
  t.sigma_r = 2;
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += sample_cloud_rate(t, rng);
  const double want = truncated_mean(10, 2, 1);
  EXPECT_NEAR(sum / n, want, 0.02 * want);
}

TEST(Traffic, Departures) {
  std::vector<VnfSpec> specs(3);
  specs[0].p_stay = 1.0;
  specs[1].p_stay = 0.0;
  specs[2].p_stay = 0.5;
  AllocationState s(1, 3);
  s.users(0, 0) = 50;
  s.users(1, 1) = 70;
  s.users(0, 2) = 100000;
  Rng rng(4);
  const Eigen::MatrixXi gone = apply_departures(s, specs, rng);
  EXPECT_EQ(s.users(0, 0), 50);
  EXPECT_EQ(gone(0, 0), 0);
  EXPECT_EQ(s.users(1, 1), 0);
  EXPECT_EQ(gone(1, 1), 70);
  EXPECT_NEAR(gone(0, 2), 50000, 500);
  EXPECT_EQ(s.users(0, 2) + gone(0, 2), 100000);
}

TEST(Encoding, LengthAndLayout) {
  EXPECT_EQ(encoded_size(10, 10), 341);
  const SystemModel m = model(2, 3);
  AllocationState s(2, 3);
  EpochTraffic t;
  t.arrivals = Eigen::VectorXi::Zero(3);
  t.lambdas = Eigen::VectorXd::Zero(3);
  t.cloud_rate = 10;
  const Eigen::VectorXd x = encode_state(s, t, 1, m);
  ASSERT_EQ(x.size(), encoded_size(2, 3));
  Eigen::VectorXd want = Eigen::VectorXd::Zero(x.size());
  want(x.size() - 4) = 1.0;  // rate / mu_r
  want(x.size() - 3 + 1) = 1.0;
  EXPECT_EQ(x, want);
  EXPECT_EQ(encode_state(s, t, 1, m), x);
  EXPECT_THROW(encode_state(s, t, 3, m), std::out_of_range);
}

TEST(Encoding, Boxes) {
  const SystemModel m = model(2, 2);
  AllocationState s(2, 2);
  s.cpu(0, 0) = 10;
  s.mem(0, 0) = 5;
  s.cpu(0, 1) = 4;
  s.mem(0, 1) = 6;
  const ParamBox b = feasible_box(s, m, 0);
  EXPECT_DOUBLE_EQ(b.cpu_lo, -14);
  EXPECT_DOUBLE_EQ(b.cpu_hi, 36);
  EXPECT_DOUBLE_EQ(b.mem_lo, -11);
  EXPECT_DOUBLE_EQ(b.mem_hi, 39);
  const ParamBox i = instance_box(s, m, 0, 1);
  EXPECT_DOUBLE_EQ(i.cpu_lo, -4);
  EXPECT_DOUBLE_EQ(i.mem_lo, -6);
  EXPECT_DOUBLE_EQ(i.cpu_hi, 36);
}

TEST(Environment, ZeroArrivalsVisitEachVnfOnce) {
  SystemModel m = model(2, 3);
  for (VnfSpec& v : m.vnfs) {
    v.mu_arr = 0;
    v.sigma_arr = 0;
  }
  Environment env(m, 5);
  for (int e = 0; e < 3; ++e) {
    std::vector<int> seen;
    const EpochSummary s = env.advance_epoch([&](const DecisionPoint& p) {
      EXPECT_FALSE(p.with_user);
      seen.push_back(p.vnf);
      return offload_all(p);
    });
    EXPECT_EQ(s.transitions.size(), 3u);
    std::sort(seen.begin(), seen.end());
    EXPECT_EQ(seen, (std::vector<int>{0, 1, 2}));
    EXPECT_EQ(s.active_users, 0);
  }
}

TEST(Environment, OneDecisionPerRequestPlusIdleVnfs) {
  Environment env(model(2, 3), 6);
  for (int e = 0; e < 200; ++e) {
    const EpochSummary s = env.advance_epoch(offload_all);
    std::size_t expected = 0;
    for (int j = 0; j < 3; ++j) expected += static_cast<std::size_t>(std::max(s.traffic.arrivals(j), 1));
    ASSERT_EQ(s.transitions.size(), expected);
  }
}

TEST(Environment, UsersAreConservedAndCapacityHolds) {
  const SystemModel m = model(2, 3);
  Environment env(m, 7);
  Rng pick(8);
  long arrived = 0;
  for (int e = 0; e < 300; ++e) {
    const EpochSummary s = env.advance_epoch([&](const DecisionPoint& p) {
      std::uniform_int_distribution<int> target(0, 2);
      std::uniform_real_distribution<double> delta(-10, 20);
      return ParamAction{target(pick), delta(pick), delta(pick)};
    });
    arrived += s.traffic.arrivals.sum();
    EXPECT_EQ(env.cumulative_arrivals(), arrived);
    EXPECT_EQ(env.state().total_users(), env.cumulative_arrivals() - env.cumulative_departures());
    const AllocationState& a = env.state();
    for (int k = 0; k < a.servers(); ++k) {
      EXPECT_LE(a.cpu.row(k).sum(), m.pool.rho_max + 1e-9);
      EXPECT_LE(a.mem.row(k).sum(), m.pool.eta_max + 1e-9);
    }
    EXPECT_GE(a.cpu.minCoeff(), 0.0);
    EXPECT_GE(a.mem.minCoeff(), 0.0);
    EXPECT_GE(a.users.minCoeff(), 0);
  }
}

TEST(Environment, NextStateIsTheFollowingDecision) {
  Environment env(model(2, 3), 9);
  Eigen::VectorXd carried;
  for (int e = 0; e < 50; ++e) {
    std::vector<Eigen::VectorXd> seen;
    const EpochSummary s = env.advance_epoch([&](const DecisionPoint& p) {
      seen.push_back(p.features);
      return offload_all(p);
    });
    if (carried.size() > 0) {
      EXPECT_EQ(carried, seen.front());
    }
    for (std::size_t i = 0; i < s.transitions.size(); ++i) {
      EXPECT_EQ(s.transitions[i].state, seen[i]);
      if (i + 1 < s.transitions.size()) EXPECT_EQ(s.transitions[i].next_state, seen[i + 1]);
    }
    carried = s.transitions.back().next_state;
  }
}

TEST(Environment, SameSeedSameTrace) {
  Environment a(model(2, 3), 10), b(model(2, 3), 10), c(model(2, 3), 11);
  bool differs = false;
  for (int e = 0; e < 100; ++e) {
    const EpochSummary sa = a.advance_epoch(offload_all);
    const EpochSummary sb = b.advance_epoch(offload_all);
    const EpochSummary sc = c.advance_epoch(offload_all);
    ASSERT_EQ(sa.traffic.arrivals, sb.traffic.arrivals);
    ASSERT_EQ(sa.traffic.cloud_rate, sb.traffic.cloud_rate);
    ASSERT_EQ(sa.allocation, sb.allocation);
    ASSERT_EQ(sa.network_cost, sb.network_cost);
    differs = differs || sa.traffic.arrivals != sc.traffic.arrivals;
  }
  EXPECT_TRUE(differs);
}

TEST(Environment, TraceDoesNotDependOnPolicy) {
  Environment a(model(2, 3), 12), b(model(2, 3), 12);
  for (int e = 0; e < 100; ++e) {
    const EpochSummary sa = a.advance_epoch(offload_all);
    const EpochSummary sb = b.advance_epoch([](const DecisionPoint& p) { return ParamAction{0, 5, 5}; });
    ASSERT_EQ(sa.traffic.arrivals, sb.traffic.arrivals);
    ASSERT_EQ(sa.traffic.cloud_rate, sb.traffic.cloud_rate);
    ASSERT_EQ(sa.departures, sb.departures);
  }
}

TEST(Environment, RateBlockHeldForTmaxEpochs) {
  SystemModel m = model(1, 2);
  m.traffic.t_max = 5;
  Environment env(m, 13);
  Eigen::VectorXd block;
  for (int e = 0; e < 20; ++e) {
    const EpochSummary s = env.advance_epoch(offload_all);
    if (e % 5 == 0) {
      if (e > 0) EXPECT_NE(s.traffic.lambdas, block);
      block = s.traffic.lambdas;
    } else {
      EXPECT_EQ(s.traffic.lambdas, block);
    }
  }
}

TEST(Environment, CloudOnlyQuality) {
  const SystemModel m = model(2, 3);
  Environment env(m, 14);
  for (int e = 0; e < 20; ++e) env.advance_epoch(offload_all);
  const AllocationState& s = env.state();
  EXPECT_DOUBLE_EQ(cpu_utilization(s, m), 0);
  for (int j = 0; j < 3; ++j)
    if (s.users(2, j) > 0) EXPECT_DOUBLE_EQ(instance_qos(2, j, s, m.vnfs), m.vnfs[static_cast<std::size_t>(j)].qos_max);
}

#include "vnflab/bench/compare.hpp"
#include "vnflab/bench/config.hpp"
#include "vnflab/bench/experiment.hpp"
#include "vnflab/bench/metrics.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace vnflab;
using namespace vnflab::bench;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / ("vnflab-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig quick(AgentKind kind, long epochs = 60) {
  ExperimentConfig c = scaled_config(2, 3);
  c.agent.kind = kind;
  c.run.total_epochs = epochs;
  c.run.eval_epochs = 20;
  for (auto* p : {&c.agent.ddqn, &c.agent.ddpg}) {
    p->hidden = {16};
    p->batch_size = 8;
    p->warmup_size = 32;
  }
  c.agent.pat.hidden = {16};
  c.agent.pat.batch_size = 8;
  c.agent.pat.warmup_size = 32;
  return c;
}

}  // namespace

TEST(Config, DefaultsMatchTheReferenceTables) {
  const ExperimentConfig c = default_config();
  // c0 cr dc m0 mr dm qos_min qos_max gamma mu sigma
  const double rows[10][11] = {
      {3, 5, 4, 6, 5, 3, 35, 70, 2, 2, 1.5},  {2, 3, 2, 4, 4, 2, 36, 80, 2, 2.5, 0.2},
      {1, 4, 2, 2, 3, 2, 27, 63, 2, 4, 0.5},  {1, 4, 3, 1, 3, 1, 40, 90, 2, 1, 1},
      {2, 6, 2, 3, 4, 3, 20, 100, 2, 2.5, 1}, {1, 2, 1, 0, 3, 2, 5, 30, 2, 2, 1.5},
      {2, 3, 2, 2, 5, 3, 56, 80, 2, 5, 1},    {3, 4, 2, 3, 6, 5, 20, 53, 2, 2, 1},
      {1, 4, 3, 4, 4, 2, 40, 90, 2, 3, 0.5},  {2, 6, 2, 3, 4, 3, 20, 100, 2, 2, 1}};
  ASSERT_EQ(c.vnfs.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    const sim::VnfSpec& v = c.vnfs[i];
    const double got[11] = {v.c0, v.cr, v.dc, v.m0, v.mr, v.dm, v.qos_min, v.qos_max, v.gamma_sla, v.mu_arr, v.sigma_arr};
    for (int f = 0; f < 11; ++f) EXPECT_DOUBLE_EQ(got[f], rows[i][f]) << "row " << i + 1 << " field " << f;
    EXPECT_EQ(v.id, static_cast<int>(i) + 1);
    EXPECT_DOUBLE_EQ(v.p_stay, 0.5);
  }
  const sim::CostParams& k = c.costs;
  EXPECT_EQ(k.d_rc, 3);
  EXPECT_EQ(k.d_rm, 4);
  EXPECT_EQ(k.d_db, 20);
  EXPECT_EQ(k.d_dt, 10);
  EXPECT_EQ(k.c_rm, 3);
  EXPECT_EQ(k.c_rp, 6);
  EXPECT_EQ(k.c_i0, 2);
  EXPECT_EQ(k.c_iv, 1);
  EXPECT_EQ(k.c_c0, 1);
  EXPECT_EQ(k.c_cv, 3);
  EXPECT_EQ(k.w1, 1);
  EXPECT_EQ(k.w2, 1);
  EXPECT_EQ(k.w3, 2);
  const agents::PatConfig& p = c.agent.pat;
  EXPECT_EQ(p.gamma, 0.99);
  EXPECT_EQ(p.tau, 5e-3);
  EXPECT_EQ(p.eps, 0.8);
  EXPECT_EQ(p.lr, 1e-3);
  EXPECT_EQ(p.eps_min, 0.05);
  EXPECT_EQ(p.sigma_noise, 0.2);
  EXPECT_EQ(p.eps_decay, 1e-3);
  EXPECT_EQ(p.clip_c, 0.5);
  EXPECT_EQ(p.clip_c_min, 0.1);
  EXPECT_EQ(p.beta, 0.2);
  EXPECT_EQ(p.gamma_max, 100);
  EXPECT_EQ(c.traffic.r_min, 1);
  EXPECT_EQ(c.traffic.t_max, 100);
  EXPECT_EQ(c.pool.k_servers, 10);
}

TEST(Config, ShippedDocumentsLoad) {
  const std::filesystem::path root = VNFLAB_SOURCE_DIR;
  EXPECT_TRUE(load_config(root / "configs/defaults.json") == default_config());
  const ExperimentConfig desk = load_config(root / "configs/desk.json");
  EXPECT_EQ(desk.pool.k_servers, 3);
  EXPECT_EQ(desk.vnfs.size(), 3u);
  EXPECT_TRUE(desk.same_system(scaled_config(3, 3)));
}

TEST(Config, JsonRoundTripAndDefaults) {
  const ExperimentConfig c = default_config();
  EXPECT_TRUE(parse_config(to_json(c)) == c);

  json doc = to_json(c);
  for (json& v : doc["vnfs"]) v.erase("p_stay");
  EXPECT_DOUBLE_EQ(parse_config(doc).vnfs[3].p_stay, 0.5);

  EXPECT_TRUE(parse_config(json::object()) == c);
}

TEST(Config, RejectsBadDocuments) {
  json doc = to_json(default_config());
  doc["pool"]["rho_max"] = -1;
  EXPECT_THROW(parse_config(doc), ConfigError);

  doc = to_json(default_config());
  doc["pool"]["colour"] = "red";
  try {
    parse_config(doc);
    FAIL() << "unknown key accepted";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("pool.colour"), std::string::npos);
  }

  doc = to_json(default_config());
  doc["run"]["total_epochs"] = 0;
  EXPECT_THROW(parse_config(doc), ConfigError);

  doc = to_json(default_config());
  doc["vnfs"] = json::array();
  EXPECT_THROW(parse_config(doc), ConfigError);

  doc = to_json(default_config());
  doc["vnfs"][0]["dc"] = 9;  // slope below elasticity
  EXPECT_THROW(parse_config(doc), ConfigError);
}

TEST(Config, SeedResolutionOrder) {
  ExperimentConfig c = default_config();
  ::unsetenv("VNF_LAB_SEED");
  EXPECT_EQ(resolve_seed(c), 1u);
  ::setenv("VNF_LAB_SEED", "77", 1);
  EXPECT_EQ(resolve_seed(c), 77u);
  c.run.seed = 5;
  EXPECT_EQ(resolve_seed(c), 5u);
  EXPECT_EQ(resolve_seed(c, 9), 9u);
  ::unsetenv("VNF_LAB_SEED");
}

TEST(Metrics, UtilizationArithmetic) {
  sim::SystemModel m = default_config().model();
  sim::AllocationState s(10, 10);
  s.cpu(0, 0) = 60;
  s.cpu(3, 2) = 40;
  s.cpu(10, 1) = 999;  // cloud row never counts
  EXPECT_DOUBLE_EQ(sim::cpu_utilization(s, m), 0.2);
  EXPECT_DOUBLE_EQ(sim::mem_utilization(sim::AllocationState(10, 10), m), 0.0);
}

TEST(Metrics, CsvHeaderAndRoundTrip) {
  EXPECT_EQ(metrics_header(),
            "epoch,network_cost,latency_per_user,financial_per_user,sla_per_user,cpu_util,mem_util,cloud_fraction,"
            "active_users,mean_reward,eps,clip_c");
  const std::filesystem::path dir = scratch("csv");
  EpochMetrics m;
  m.epoch = 3;
  m.network_cost = 1.0 / 3;
  m.cloud_fraction = 0.25;
  {
    MetricsWriter w(dir / "m.csv");
    w.write(m);
  }
  const std::vector<EpochMetrics> back = read_metrics_csv(dir / "m.csv");
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].epoch, 3);
  EXPECT_NEAR(back[0].network_cost, 1.0 / 3, 1e-9);
  EXPECT_EQ(format_row(m).substr(0, 13), "3,0.333333333");
}

TEST(Metrics, KpisAndAggregates) {
  std::vector<EpochMetrics> rows(4);
  for (int i = 0; i < 4; ++i) rows[static_cast<std::size_t>(i)].network_cost = i;
  EXPECT_DOUBLE_EQ(compute_kpis(rows).mean.network_cost, 1.5);
  EXPECT_DOUBLE_EQ(compute_kpis(rows, 2, 4).mean.network_cost, 2.5);
  KpiSummary a, b;
  a.mean.cpu_util = 0.2;
  b.mean.cpu_util = 0.4;
  const KpiAggregate agg = aggregate({a, b});
  EXPECT_DOUBLE_EQ(agg.mean.cpu_util, 0.3);
  EXPECT_NEAR(agg.std.cpu_util, std::sqrt(0.02), 1e-15);
  const std::vector<double> ma = moving_average({1, 2, 3, 4}, 2);
  EXPECT_EQ(ma, (std::vector<double>{1, 1.5, 2.5, 3.5}));
}

TEST(Experiment, CloudAgentKpis) {
  const ExperimentResult r = run_experiment(quick(AgentKind::cloud), 3);
  for (const EpochMetrics& m : r.train) {
    if (m.active_users > 0) EXPECT_DOUBLE_EQ(m.cloud_fraction, 1.0);
    EXPECT_DOUBLE_EQ(m.cpu_util, 0.0);
    // cloud users get full quality, so nobody violates the SLA
    if (m.active_users > 0) EXPECT_LT(m.sla_per_user, 0.0);
  }
}

TEST(Experiment, GreedyAdmitsUsersLocally) {
  ExperimentConfig c = default_config();
  c.agent.kind = AgentKind::greedy;
  c.run.total_epochs = 50;
  c.run.eval_epochs = 0;
  const ExperimentResult r = run_experiment(c, 4);
  EXPECT_LT(r.train_kpis.mean.cloud_fraction, 1.0);
  EXPECT_GT(r.train_kpis.mean.cpu_util, 0.0);
}

TEST(Experiment, SnapshotsReproduceStreamedCost) {
  ExperimentConfig c = quick(AgentKind::random);
  c.run.snapshots = true;
  const std::filesystem::path dir = scratch("snap");
  RunOptions o;
  o.out_dir = dir;
  const ExperimentResult r = run_experiment(c, 5, o);
  std::ifstream in(r.dir / "snapshots.jsonl");
  const sim::SystemModel model = c.model();
  std::string line;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    const json snap = json::parse(line);
    const EpochMetrics& m = i < r.train.size() ? r.train[i] : r.eval[i - r.train.size()];
    EXPECT_NEAR(snapshot_network_cost(snap, model), m.network_cost, 1e-9);
    EXPECT_EQ(snap.at("epoch").get<long>(), m.epoch);
    ++i;
  }
  EXPECT_EQ(i, r.train.size() + r.eval.size());

  // the persisted file carries the same values at 9 significant digits
  const std::vector<EpochMetrics> file = read_metrics_csv(r.dir / "metrics.csv");
  ASSERT_EQ(file.size(), r.train.size());
  for (std::size_t e = 0; e < file.size(); ++e)
    EXPECT_NEAR(file[e].network_cost, r.train[e].network_cost, 1e-8 * std::max(1.0, std::abs(r.train[e].network_cost)));
}

TEST(Experiment, CostComponentsAddUp) {
  const ExperimentResult r = run_experiment(quick(AgentKind::greedy), 6);
  const sim::CostParams k = default_config().costs;
  for (const EpochMetrics& m : r.train) {
    if (m.active_users == 0) continue;
    EXPECT_NEAR(m.network_cost, k.w1 * m.latency_per_user + k.w2 * m.financial_per_user + k.w3 * m.sla_per_user,
                1e-9 * std::max(1.0, std::abs(m.network_cost)));
  }
}

TEST(Experiment, SameSeedSameFiles) {
  for (AgentKind kind : {AgentKind::pat, AgentKind::ddqn, AgentKind::ddpg, AgentKind::random}) {
    const ExperimentConfig c = quick(kind);
    RunOptions a, b;
    a.out_dir = scratch("det-a");
    b.out_dir = scratch("det-b");
    const ExperimentResult ra = run_experiment(c, 7, a);
    const ExperimentResult rb = run_experiment(c, 7, b);
    EXPECT_EQ(slurp(ra.dir / "metrics.csv"), slurp(rb.dir / "metrics.csv")) << agent_name(kind);
    EXPECT_EQ(slurp(ra.dir / "eval_metrics.csv"), slurp(rb.dir / "eval_metrics.csv")) << agent_name(kind);
    EXPECT_FALSE(slurp(ra.dir / "metrics.csv").empty());
  }
}

TEST(Experiment, CheckpointReloadGivesSameEvaluation) {
  ExperimentConfig c = quick(AgentKind::pat);
  const std::filesystem::path dir = scratch("ckpt");
  RunOptions save;
  save.out_dir = dir / "trained";
  save.save_checkpoint = (dir / "pat.ckpt").string();
  const ExperimentResult trained = run_experiment(c, 8, save);

  RunOptions load;
  load.out_dir = dir / "reloaded";
  load.train = false;
  load.load_checkpoint = (dir / "pat.ckpt").string();
  const ExperimentResult reloaded = run_experiment(c, 8, load);
  EXPECT_TRUE(reloaded.train.empty());
  EXPECT_EQ(slurp(trained.dir / "eval_metrics.csv"), slurp(reloaded.dir / "eval_metrics.csv"));
}

TEST(Compare, SharedTraceAndSummaries) {
  const std::filesystem::path dir = scratch("cmp");
  RunOptions o;
  o.out_dir = dir;
  std::vector<CompareEntry> entries{{AgentKind::cloud, quick(AgentKind::cloud)},
                                    {AgentKind::greedy, quick(AgentKind::greedy)},
                                    {AgentKind::random, quick(AgentKind::random)}};
  const std::vector<ComparisonRow> rows = compare(entries, {1, 2}, o);
  write_comparison(dir, rows);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t s = 0; s < 2; ++s)
    for (const ComparisonRow& row : rows) EXPECT_EQ(row.runs[s].trace_hash, rows[0].runs[s].trace_hash);
  EXPECT_NE(rows[0].runs[0].trace_hash, rows[0].runs[1].trace_hash);

  for (const ComparisonRow& row : rows) {
    const json summary = json::parse(slurp(dir / row.agent / "summary.json"));
    for (const MetricField& f : metric_fields()) {
      double sum = 0;
      for (const ExperimentResult& r : row.runs) {
        const json per_seed = json::parse(slurp(r.dir / "summary.json"));
        sum += per_seed["eval"][f.name].get<double>();
      }
      EXPECT_NEAR(sum / 2, summary["eval"]["mean"][f.name].get<double>(), 1e-12) << row.agent << ' ' << f.name;
    }
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "comparison.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "curves.csv"));
}

TEST(Compare, IdenticalAgentsGiveIdenticalRows) {
  const std::vector<ComparisonRow> rows =
      compare({{AgentKind::cloud, quick(AgentKind::cloud)}, {AgentKind::cloud, quick(AgentKind::cloud)}}, {3});
  for (const MetricField& f : metric_fields()) EXPECT_EQ(rows[0].eval.mean.*f.member, rows[1].eval.mean.*f.member);
}

TEST(Compare, RefusesDifferentSystems) {
  ExperimentConfig other = quick(AgentKind::greedy);
  other.pool.rho_max = 40;
  EXPECT_THROW(compare({{AgentKind::cloud, quick(AgentKind::cloud)}, {AgentKind::greedy, other}}, {1}), ConfigError);
}

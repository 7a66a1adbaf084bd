#include "vnflab/bench/experiment.hpp"

#include "vnflab/agents/ddpg.hpp"
#include "vnflab/agents/ddqn.hpp"
#include "vnflab/agents/heuristics.hpp"
#include "vnflab/agents/pat.hpp"
#include "vnflab/sim/cost_model.hpp"
#include "vnflab/sim/encoding.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace vnflab::bench {

using nlohmann::json;

namespace {

class TraceHash {
 public:
  void add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h_ ^= (v >> (8 * i)) & 0xffu;
      h_ *= 1099511628211ULL;
    }
  }
  void add(double v) { add(std::bit_cast<std::uint64_t>(v)); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 1469598103934665603ULL;
};

template <typename Matrix>
json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename Matrix>
void matrix_from_json(const json& rows, Matrix& m) {
  m.resize(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rows.at(r).at(c).get<typename Matrix::Scalar>();
}

json kpi_json(const EpochMetrics& m) {
  json out = json::object();
  for (const MetricField& f : metric_fields()) out[f.name] = m.*f.member;
  return out;
}

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace

std::unique_ptr<agents::Agent> make_agent(const ExperimentConfig& config, AgentKind kind, std::uint64_t seed) {
  agents::AgentShape shape;
  shape.state_size = sim::encoded_size(config.pool.k_servers, static_cast<int>(config.vnfs.size()));
  shape.servers = config.pool.k_servers;
  shape.param_scale = {config.pool.rho_max, config.pool.eta_max};
  switch (kind) {
    case AgentKind::pat: return std::make_unique<agents::PatAgent>(config.agent.pat, shape, seed);
    case AgentKind::greedy: return std::make_unique<agents::GreedyAgent>();
    case AgentKind::cloud: return std::make_unique<agents::CloudAgent>();
    case AgentKind::random: return std::make_unique<agents::RandomAgent>(seed);
    case AgentKind::ddqn: return std::make_unique<agents::DdqnAgent>(config.agent.ddqn, shape, seed);
    case AgentKind::ddpg: return std::make_unique<agents::DdpgAgent>(config.agent.ddpg, shape, seed);
  }
  throw ConfigError("agent.kind: unsupported agent");
}

json snapshot_json(long epoch, const std::string& phase, const sim::EpochSummary& s) {
  const sim::AllocationState& a = s.allocation;
  json active = json::array();
  for (bool b : a.server_active_prev) active.push_back(b);
  return {{"epoch", epoch},
          {"phase", phase},
          {"cloud_rate", s.traffic.cloud_rate},
          {"network_cost", s.network_cost},
          {"cpu", matrix_json(a.cpu)},
          {"mem", matrix_json(a.mem)},
          {"users", matrix_json(a.users)},
          {"cpu_prev", matrix_json(a.cpu_prev)},
          {"mem_prev", matrix_json(a.mem_prev)},
          {"server_active_prev", active}};
}

double snapshot_network_cost(const json& snap, const sim::SystemModel& model) {
  sim::AllocationState a(model.servers(), model.n_vnfs());
  matrix_from_json(snap.at("cpu"), a.cpu);
  matrix_from_json(snap.at("mem"), a.mem);
  matrix_from_json(snap.at("users"), a.users);
  matrix_from_json(snap.at("cpu_prev"), a.cpu_prev);
  matrix_from_json(snap.at("mem_prev"), a.mem_prev);
  a.server_active_prev.clear();
  for (const json& b : snap.at("server_active_prev")) a.server_active_prev.push_back(b.get<bool>());
  return sim::network_cost(a, model.costs, model.vnfs, snap.at("cloud_rate").get<double>());
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::uint64_t seed, const RunOptions& options) {
  validate(config);
  const sim::SystemModel model = config.model();
  sim::Environment train_env(model, seed);
  sim::Environment eval_env(model, seed, {}, "eval-traffic");
  std::unique_ptr<agents::Agent> agent = make_agent(config, config.agent.kind, seed);

  if (!options.load_checkpoint.empty()) {
    std::ifstream in(options.load_checkpoint);
    if (!in) throw std::runtime_error("cannot open checkpoint " + options.load_checkpoint);
    agent->load(in);
  }

  ExperimentResult result;
  result.agent = agent->name();
  result.seed = seed;

  std::optional<MetricsWriter> train_writer, eval_writer;
  std::ofstream snapshots;
  const bool persist = !options.out_dir.empty();
  if (persist) {
    result.dir = options.out_dir / result.agent / ("seed-" + std::to_string(seed));
    std::filesystem::create_directories(result.dir);
    if (options.train) train_writer.emplace(result.dir / "metrics.csv");
    if (config.run.eval_epochs > 0) eval_writer.emplace(result.dir / "eval_metrics.csv");
    if (config.run.snapshots) {
      snapshots.open(result.dir / "snapshots.jsonl");
      if (!snapshots) throw std::runtime_error("cannot write snapshots in " + result.dir.string());
    }
  }

  TraceHash trace;
  auto run_phase = [&](sim::Environment& env, long epochs, bool training, std::vector<EpochMetrics>& rows,
                       std::optional<MetricsWriter>& writer, const char* phase) {
    const sim::DecisionFn decide = agent->policy(training);
    rows.reserve(static_cast<std::size_t>(epochs));
    for (long e = 0; e < epochs; ++e) {
      const sim::EpochSummary summary = env.advance_epoch(decide);
      if (training && agent->learns()) {
        for (const sim::TransitionRecord& t : summary.transitions) agent->observe(t);
        agent->train();
      }
      const EpochMetrics m = epoch_metrics(env.epoch(), summary, agent->exploration());
      rows.push_back(m);
      if (writer && rows.size() % static_cast<std::size_t>(config.run.metrics_every) == 0) writer->write(m);
      if (snapshots.is_open()) snapshots << snapshot_json(m.epoch, phase, summary).dump() << '\n';

      trace.add(static_cast<std::uint64_t>(env.epoch()));
      for (Eigen::Index j = 0; j < summary.traffic.arrivals.size(); ++j)
        trace.add(static_cast<std::uint64_t>(summary.traffic.arrivals(j)));
      trace.add(summary.traffic.cloud_rate);
      trace.add(static_cast<std::uint64_t>(summary.departures));

      if (options.log && options.log_every > 0 && (e + 1) % options.log_every == 0) {
        *options.log << result.agent << " seed " << seed << ' ' << phase << " epoch " << (e + 1) << '/' << epochs
                     << " network_cost " << m.network_cost << " mean_reward " << m.mean_reward << '\n';
      }
    }
  };

  if (options.train) run_phase(train_env, config.run.total_epochs, true, result.train, train_writer, "train");
  if (train_writer) train_writer->flush();

  const std::string checkpoint = !options.save_checkpoint.empty() ? options.save_checkpoint : config.run.checkpoint_path;
  if (!checkpoint.empty() && agent->learns()) {
    std::filesystem::path path = checkpoint;
    if (path.is_relative() && persist) path = result.dir / path;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
    agent->save(out);
  }

  run_phase(eval_env, config.run.eval_epochs, false, result.eval, eval_writer, "eval");

  result.train_kpis = compute_kpis(result.train);
  result.eval_kpis = compute_kpis(result.eval);
  result.trace_hash = trace.value();
  if (persist) write_json(result.dir / "summary.json", summary_json(result, config));
  return result;
}

json summary_json(const ExperimentResult& r, const ExperimentConfig& config) {
  return {{"agent", r.agent},
          {"seed", r.seed},
          {"total_epochs", static_cast<long>(r.train.size())},
          {"eval_epochs", static_cast<long>(r.eval.size())},
          {"smoothing_window", config.run.smoothing_window},
          {"trace_hash", hex(r.trace_hash)},
          {"train", kpi_json(r.train_kpis.mean)},
          {"eval", kpi_json(r.eval_kpis.mean)}};
}

json aggregate_json(const std::vector<ExperimentResult>& results, const ExperimentConfig& config) {
  std::vector<KpiSummary> train, eval;
  json seeds = json::array();
  for (const ExperimentResult& r : results) {
    train.push_back(r.train_kpis);
    eval.push_back(r.eval_kpis);
    seeds.push_back(r.seed);
  }
  const KpiAggregate t = aggregate(train), e = aggregate(eval);
  return {{"agent", results.empty() ? std::string() : results.front().agent},
          {"seeds", seeds},
          {"smoothing_window", config.run.smoothing_window},
          {"train", {{"mean", kpi_json(t.mean)}, {"std", kpi_json(t.std)}}},
          {"eval", {{"mean", kpi_json(e.mean)}, {"std", kpi_json(e.std)}}}};
}

std::vector<ExperimentResult> run_seeds(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                                        const RunOptions& options) {
  std::vector<ExperimentResult> results;
  for (std::uint64_t s : seeds) results.push_back(run_experiment(config, s, options));
  if (!options.out_dir.empty() && !results.empty()) {
    const std::filesystem::path dir = options.out_dir / results.front().agent;
    std::filesystem::create_directories(dir);
    write_json(dir / "summary.json", aggregate_json(results, config));
  }
  return results;
}

}  // namespace vnflab::bench

#include "vnflab/bench/compare.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace vnflab::bench {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& path, const std::string& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << header << '\n';
  return out;
}

}  // namespace

std::vector<ComparisonRow> compare(const std::vector<CompareEntry>& entries, const std::vector<std::uint64_t>& seeds,
                                   const RunOptions& options) {
  if (entries.empty()) throw ConfigError("compare: no agents given");
  if (seeds.empty()) throw ConfigError("compare: no seeds given");
  for (std::size_t i = 1; i < entries.size(); ++i)
    if (!entries[i].config.same_system(entries.front().config))
      throw ConfigError(std::string("compare: configuration for '") + agent_name(entries[i].agent) +
                        "' describes a different pool, VNF catalogue, cost model or traffic model");

  std::vector<ComparisonRow> rows;
  for (const CompareEntry& entry : entries) {
    ExperimentConfig cfg = entry.config;
    cfg.agent.kind = entry.agent;
    ComparisonRow row;
    row.agent = agent_name(entry.agent);
    row.runs = run_seeds(cfg, seeds, options);
    std::vector<KpiSummary> train, eval;
    for (const ExperimentResult& r : row.runs) {
      train.push_back(r.train_kpis);
      eval.push_back(r.eval_kpis);
    }
    row.train = aggregate(train);
    row.eval = aggregate(eval);
    rows.push_back(std::move(row));
  }

  for (std::size_t s = 0; s < seeds.size(); ++s)
    for (const ComparisonRow& row : rows)
      if (row.runs[s].trace_hash != rows.front().runs[s].trace_hash)
        throw std::logic_error("compare: agent '" + row.agent + "' saw a different traffic trace for seed " +
                               std::to_string(seeds[s]));
  return rows;
}

void write_comparison(const std::filesystem::path& dir, const std::vector<ComparisonRow>& rows) {
  std::filesystem::create_directories(dir);

  std::ofstream table = open_csv(dir / "comparison.csv", "agent,phase,metric,mean,std,runs");
  for (const ComparisonRow& row : rows)
    for (const auto& [phase, agg] : {std::pair<const char*, const KpiAggregate*>{"train", &row.train},
                                     {"eval", &row.eval}})
      for (const MetricField& f : metric_fields())
        table << row.agent << ',' << phase << ',' << f.name << ',' << num(agg->mean.*f.member) << ','
              << num(agg->std.*f.member) << ',' << agg->runs << '\n';

  std::ofstream lng = open_csv(dir / "comparison_long.csv", "agent,seed,phase,metric,value");
  for (const ComparisonRow& row : rows)
    for (const ExperimentResult& r : row.runs)
      for (const auto& [phase, kpi] : {std::pair<const char*, const KpiSummary*>{"train", &r.train_kpis},
                                       {"eval", &r.eval_kpis}})
        for (const MetricField& f : metric_fields())
          lng << row.agent << ',' << r.seed << ',' << phase << ',' << f.name << ',' << num(kpi->mean.*f.member)
              << '\n';

  std::ofstream curves =
      open_csv(dir / "curves.csv", "agent,seed,phase,epoch,network_cost,cloud_fraction,cpu_util,mean_reward");
  for (const ComparisonRow& row : rows)
    for (const ExperimentResult& r : row.runs)
      for (const auto& [phase, series] : {std::pair<const char*, const std::vector<EpochMetrics>*>{"train", &r.train},
                                          {"eval", &r.eval}})
        for (const EpochMetrics& m : *series)
          curves << row.agent << ',' << r.seed << ',' << phase << ',' << m.epoch << ',' << num(m.network_cost) << ','
                 << num(m.cloud_fraction) << ',' << num(m.cpu_util) << ',' << num(m.mean_reward) << '\n';
}

}  // namespace vnflab::bench

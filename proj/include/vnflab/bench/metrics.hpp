#pragma once

#include "vnflab/agents/agent.hpp"
#include "vnflab/sim/environment.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace vnflab::bench {

struct EpochMetrics {
  long epoch = 0;
  double network_cost = 0;
  double latency_per_user = 0;
  double financial_per_user = 0;
  double sla_per_user = 0;
  double cpu_util = 0;
  double mem_util = 0;
  double cloud_fraction = 0;
  double active_users = 0;
  double mean_reward = 0;
  double eps = 0;
  double clip_c = 0;
};

struct MetricField {
  const char* name;
  double EpochMetrics::*member;
};

/// Every column after `epoch`, in file order.
const std::array<MetricField, 11>& metric_fields();
std::string metrics_header();
/// One CSV row with 9 significant digits per value.
std::string format_row(const EpochMetrics& m);

EpochMetrics epoch_metrics(long epoch, const sim::EpochSummary& summary, const agents::Exploration& exploration);

/// Streams rows to a CSV file; whatever was written survives an exception.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::filesystem::path& path);
  void write(const EpochMetrics& m);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
};

std::vector<EpochMetrics> read_metrics_csv(const std::filesystem::path& path);

/// Means over a metrics stream; `epochs` counts the rows averaged.
struct KpiSummary {
  long epochs = 0;
  EpochMetrics mean;
};

KpiSummary compute_kpis(const std::vector<EpochMetrics>& rows);
/// Means over rows [first, last).
KpiSummary compute_kpis(const std::vector<EpochMetrics>& rows, std::size_t first, std::size_t last);

/// Across-seed mean and sample standard deviation of per-seed summaries.
struct KpiAggregate {
  int runs = 0;
  EpochMetrics mean;
  EpochMetrics std;
};

KpiAggregate aggregate(const std::vector<KpiSummary>& per_seed);

/// Trailing moving average with the given window (shorter at the start).
std::vector<double> moving_average(const std::vector<double>& values, int window);

}  // namespace vnflab::bench

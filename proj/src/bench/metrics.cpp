#include "vnflab/bench/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace vnflab::bench {

namespace {

void append_value(std::string& line, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);  // no "-0"
  line += buf;
}

}  // namespace

const std::array<MetricField, 11>& metric_fields() {
  static const std::array<MetricField, 11> fields{{
      {"network_cost", &EpochMetrics::network_cost},
      {"latency_per_user", &EpochMetrics::latency_per_user},
      {"financial_per_user", &EpochMetrics::financial_per_user},
      {"sla_per_user", &EpochMetrics::sla_per_user},
      {"cpu_util", &EpochMetrics::cpu_util},
      {"mem_util", &EpochMetrics::mem_util},
      {"cloud_fraction", &EpochMetrics::cloud_fraction},
      {"active_users", &EpochMetrics::active_users},
      {"mean_reward", &EpochMetrics::mean_reward},
      {"eps", &EpochMetrics::eps},
      {"clip_c", &EpochMetrics::clip_c},
  }};
  return fields;
}

std::string metrics_header() {
  std::string h = "epoch";
  for (const MetricField& f : metric_fields()) {
    h += ',';
    h += f.name;
  }
  return h;
}

std::string format_row(const EpochMetrics& m) {
  std::string line = std::to_string(m.epoch);
  for (const MetricField& f : metric_fields()) {
    line += ',';
    append_value(line, m.*f.member);
  }
  return line;
}

EpochMetrics epoch_metrics(long epoch, const sim::EpochSummary& s, const agents::Exploration& exploration) {
  EpochMetrics m;
  m.epoch = epoch;
  m.network_cost = s.network_cost;
  const double users = static_cast<double>(s.active_users);
  if (users > 0) {
    m.latency_per_user = s.totals.latency / users;
    m.financial_per_user = s.totals.financial / users;
    m.sla_per_user = s.totals.sla / users;
  }
  m.cpu_util = s.cpu_util;
  m.mem_util = s.mem_util;
  m.cloud_fraction = s.cloud_fraction;
  m.active_users = users;
  m.mean_reward = -s.mean_psi;
  m.eps = exploration.eps;
  m.clip_c = exploration.clip_c;
  return m;
}

MetricsWriter::MetricsWriter(const std::filesystem::path& path) : out_(path) {
  if (!out_) throw std::runtime_error("cannot write metrics file " + path.string());
  out_ << metrics_header() << '\n';
}

void MetricsWriter::write(const EpochMetrics& m) { out_ << format_row(m) << '\n'; }

std::vector<EpochMetrics> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read metrics file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != metrics_header())
    throw std::runtime_error(path.string() + ": unexpected metrics header");
  std::vector<EpochMetrics> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string cell;
    EpochMetrics m;
    if (!std::getline(cells, cell, ',')) throw std::runtime_error(path.string() + ": empty row");
    m.epoch = std::stol(cell);
    for (const MetricField& f : metric_fields()) {
      if (!std::getline(cells, cell, ',')) throw std::runtime_error(path.string() + ": short row");
      m.*f.member = std::stod(cell);
    }
    rows.push_back(m);
  }
  return rows;
}

KpiSummary compute_kpis(const std::vector<EpochMetrics>& rows) { return compute_kpis(rows, 0, rows.size()); }

KpiSummary compute_kpis(const std::vector<EpochMetrics>& rows, std::size_t first, std::size_t last) {
  if (first > last || last > rows.size()) throw std::out_of_range("compute_kpis: bad row range");
  KpiSummary k;
  k.epochs = static_cast<long>(last - first);
  if (k.epochs == 0) return k;
  for (const MetricField& f : metric_fields()) {
    double sum = 0;
    for (std::size_t i = first; i < last; ++i) sum += rows[i].*f.member;
    k.mean.*f.member = sum / static_cast<double>(k.epochs);
  }
  k.mean.epoch = k.epochs;
  return k;
}

KpiAggregate aggregate(const std::vector<KpiSummary>& per_seed) {
  KpiAggregate a;
  a.runs = static_cast<int>(per_seed.size());
  if (per_seed.empty()) return a;
  const double n = static_cast<double>(per_seed.size());
  for (const MetricField& f : metric_fields()) {
    double sum = 0;
    for (const KpiSummary& k : per_seed) sum += k.mean.*f.member;
    const double mean = sum / n;
    double sq = 0;
    for (const KpiSummary& k : per_seed) sq += (k.mean.*f.member - mean) * (k.mean.*f.member - mean);
    a.mean.*f.member = mean;
    a.std.*f.member = per_seed.size() > 1 ? std::sqrt(sq / (n - 1)) : 0.0;
  }
  return a;
}

std::vector<double> moving_average(const std::vector<double>& values, int window) {
  if (window < 1) throw std::invalid_argument("moving_average: window must be positive");
  std::vector<double> out(values.size());
  double sum = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= static_cast<std::size_t>(window)) sum -= values[i - static_cast<std::size_t>(window)];
    const std::size_t n = std::min(i + 1, static_cast<std::size_t>(window));
    out[i] = sum / static_cast<double>(n);
  }
  return out;
}

}  // namespace vnflab::bench

#pragma once

#include "vnflab/bench/experiment.hpp"

#include <filesystem>
#include <vector>

namespace vnflab::bench {

struct CompareEntry {
  AgentKind agent;
  ExperimentConfig config;  // must describe the same system as every other entry
};

struct ComparisonRow {
  std::string agent;
  KpiAggregate train;
  KpiAggregate eval;
  std::vector<ExperimentResult> runs;  // one per seed
};

/// Runs every agent on every seed. A given seed yields the same traffic trace
/// for all agents; this is checked and a std::logic_error is raised if it
/// ever fails. Entries describing different systems are refused with a
/// ConfigError.
std::vector<ComparisonRow> compare(const std::vector<CompareEntry>& entries, const std::vector<std::uint64_t>& seeds,
                                   const RunOptions& options = {});

/// comparison.csv (per-agent mean and std), comparison_long.csv (one value
/// per agent, seed, phase and metric) and curves.csv (per-epoch series).
void write_comparison(const std::filesystem::path& dir, const std::vector<ComparisonRow>& rows);

}  // namespace vnflab::bench

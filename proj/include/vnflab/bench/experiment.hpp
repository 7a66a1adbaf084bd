#pragma once

#include "vnflab/agents/agent.hpp"
#include "vnflab/bench/config.hpp"
#include "vnflab/bench/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace vnflab::bench {

std::unique_ptr<agents::Agent> make_agent(const ExperimentConfig& config, AgentKind kind, std::uint64_t seed);

struct RunOptions {
  std::filesystem::path out_dir;  // empty: keep results in memory only
  bool train = true;              // false: evaluation only
  std::string load_checkpoint;
  std::string save_checkpoint;    // overrides run.checkpoint_path
  std::ostream* log = nullptr;    // progress lines, when set
  long log_every = 1000;
};

struct ExperimentResult {
  std::string agent;
  std::uint64_t seed = 0;
  std::vector<EpochMetrics> train;
  std::vector<EpochMetrics> eval;
  KpiSummary train_kpis;
  KpiSummary eval_kpis;
  std::uint64_t trace_hash = 0;  // fingerprint of the arrival/departure/link-rate sequence
  std::filesystem::path dir;
};

/// Builds the environment and agent for `seed`, trains for run.total_epochs
/// (learners observe and update after every epoch), then evaluates for
/// run.eval_epochs with exploration disabled. Evaluation starts from an empty
/// network on its own traffic stream, so what exploration left allocated does
/// not count against the policy. Files go under
/// out_dir/<agent>/seed-<seed>/.
ExperimentResult run_experiment(const ExperimentConfig& config, std::uint64_t seed, const RunOptions& options = {});

/// Runs one seed per entry and writes out_dir/<agent>/summary.json with the
/// across-seed aggregate.
std::vector<ExperimentResult> run_seeds(const ExperimentConfig& config, const std::vector<std::uint64_t>& seeds,
                                        const RunOptions& options = {});

nlohmann::json summary_json(const ExperimentResult& result, const ExperimentConfig& config);
nlohmann::json aggregate_json(const std::vector<ExperimentResult>& results, const ExperimentConfig& config);

/// Allocation snapshot as persisted in snapshots.jsonl.
nlohmann::json snapshot_json(long epoch, const std::string& phase, const sim::EpochSummary& summary);
/// Network cost recomputed from a persisted snapshot.
double snapshot_network_cost(const nlohmann::json& snapshot, const sim::SystemModel& model);

}  // namespace vnflab::bench

#pragma once

#include "vnflab/agents/ddqn.hpp"
#include "vnflab/agents/pat.hpp"
#include "vnflab/sim/types.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace vnflab::bench {

/// Schema or invariant violation; the message starts with the offending path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AgentKind { pat, greedy, cloud, random, ddqn, ddpg };

const char* agent_name(AgentKind kind);
AgentKind parse_agent(const std::string& name);

struct AgentConfig {
  AgentKind kind = AgentKind::pat;
  agents::PatConfig pat;
  agents::BaselineConfig ddqn;
  agents::BaselineConfig ddpg;

  friend bool operator==(const AgentConfig&, const AgentConfig&) = default;
};

struct RunConfig {
  std::optional<std::uint64_t> seed;  // unset: VNF_LAB_SEED, then 1
  long total_epochs = 20000;
  long eval_epochs = 1000;
  long metrics_every = 1;
  std::string checkpoint_path;
  int smoothing_window = 100;
  bool snapshots = false;  // persist per-epoch allocations for offline audits

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct ExperimentConfig {
  sim::PoolConfig pool;
  std::vector<sim::VnfSpec> vnfs;
  sim::CostParams costs;
  sim::TrafficConfig traffic;
  AgentConfig agent;
  RunConfig run;

  /// Simulator view; the cost normalization comes from the PAT section.
  sim::SystemModel model() const;
  /// True when both describe the same system and traffic.
  bool same_system(const ExperimentConfig& other) const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// The shipped defaults: ten servers, the ten-function catalogue and the
/// stock cost and learner constants.
ExperimentConfig default_config();
/// The first `vnfs` functions on `servers` servers, otherwise default.
ExperimentConfig scaled_config(int servers, int vnfs);

/// Parses a document, filling defaults and rejecting unknown keys.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// Throws ConfigError on the first violated invariant.
void validate(const ExperimentConfig& config);

/// Explicit override, then the config's seed, then VNF_LAB_SEED, then 1.
std::uint64_t resolve_seed(const ExperimentConfig& config, std::optional<std::uint64_t> override_seed = {});

}  // namespace vnflab::bench

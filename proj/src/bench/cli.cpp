#include "vnflab/bench/cli.hpp"

#include "vnflab/bench/compare.hpp"
#include "vnflab/bench/config.hpp"
#include "vnflab/bench/experiment.hpp"

#include "CLI11.hpp"

#include <optional>
#include <sstream>

namespace vnflab::bench {

namespace {

struct CommonFlags {
  std::vector<std::string> configs;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> agents;
  std::optional<long> epochs;
  std::string out = "runs";
  bool quiet = false;
  int seeds = 1;
  std::string checkpoint;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool many_configs) {
  if (many_configs) {
    cmd->add_option("--config", f.configs, "Configuration document (one, or one per agent)");
  } else {
    cmd->add_option("--config", f.configs, "Configuration document (defaults when omitted)")->expected(0, 1);
  }
  cmd->add_option("--seed", f.seed, "Base seed (overrides the document and VNF_LAB_SEED)");
  cmd->add_option("--agent", f.agents, "pat, greedy, cloud, random, ddqn or ddpg")->delimiter(',');
  cmd->add_option("--epochs", f.epochs, "Epoch count for the main phase");
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_flag("--quiet", f.quiet, "Suppress progress output");
  cmd->add_option("--seeds", f.seeds, "Number of consecutive seeds to run")->check(CLI::PositiveNumber);
}

ExperimentConfig config_at(const CommonFlags& f, std::size_t i) {
  if (f.configs.empty()) return default_config();
  return load_config(f.configs[std::min(i, f.configs.size() - 1)]);
}

std::vector<std::uint64_t> seed_list(const ExperimentConfig& config, const CommonFlags& f) {
  const std::uint64_t base = resolve_seed(config, f.seed);
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < f.seeds; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));
  return seeds;
}

void print_kpis(std::ostream& out, const std::string& label, const KpiAggregate& agg) {
  out << label;
  for (const char* name : {"network_cost", "cloud_fraction", "cpu_util", "mean_reward"}) {
    for (const MetricField& field : metric_fields()) {
      if (std::string(field.name) != name) continue;
      out << "  " << name << ' ' << agg.mean.*field.member;
      if (agg.runs > 1) out << " +- " << agg.std.*field.member;
    }
  }
  out << '\n';
}

int cmd_train(const CommonFlags& f, bool evaluate_only, std::ostream& out, std::ostream& err) {
  ExperimentConfig config = config_at(f, 0);
  if (f.agents.size() > 1) throw ConfigError("--agent: train and eval take a single agent");
  if (!f.agents.empty()) config.agent.kind = parse_agent(f.agents.front());
  if (evaluate_only) {
    if (f.epochs) config.run.eval_epochs = *f.epochs;
    if (config.run.eval_epochs < 1) throw ConfigError("run.eval_epochs: must be at least 1 for eval");
  } else if (f.epochs) {
    config.run.total_epochs = *f.epochs;
  }
  validate(config);

  RunOptions options;
  options.out_dir = f.out;
  options.train = !evaluate_only;
  if (evaluate_only) {
    options.load_checkpoint = f.checkpoint.empty() ? config.run.checkpoint_path : f.checkpoint;
  } else {
    options.save_checkpoint = f.checkpoint;
  }
  if (!f.quiet) options.log = &err;

  const std::vector<ExperimentResult> results = run_seeds(config, seed_list(config, f), options);
  std::vector<KpiSummary> train, eval;
  for (const ExperimentResult& r : results) {
    train.push_back(r.train_kpis);
    eval.push_back(r.eval_kpis);
  }
  if (!f.quiet) {
    out << agent_name(config.agent.kind) << " (" << results.size() << " seed" << (results.size() == 1 ? "" : "s")
        << ") -> " << (std::filesystem::path(f.out) / agent_name(config.agent.kind)).string() << '\n';
    if (!evaluate_only) print_kpis(out, "train", aggregate(train));
    if (config.run.eval_epochs > 0) print_kpis(out, "eval ", aggregate(eval));
  }
  return 0;
}

int cmd_compare(const CommonFlags& f, std::ostream& out, std::ostream& err) {
  std::vector<std::string> names = f.agents;
  if (names.empty()) names = {"pat", "greedy", "cloud", "random"};
  if (f.configs.size() > 1 && f.configs.size() != names.size())
    throw ConfigError("--config: give one document, or exactly one per agent");
  std::vector<CompareEntry> entries;
  for (std::size_t i = 0; i < names.size(); ++i) {
    CompareEntry e{parse_agent(names[i]), config_at(f, i)};
    if (f.epochs) e.config.run.total_epochs = *f.epochs;
    validate(e.config);
    entries.push_back(std::move(e));
  }
  RunOptions options;
  options.out_dir = f.out;
  if (!f.quiet) options.log = &err;
  const std::vector<ComparisonRow> rows = compare(entries, seed_list(entries.front().config, f), options);
  write_comparison(f.out, rows);
  if (!f.quiet) {
    for (const ComparisonRow& row : rows) {
      print_kpis(out, row.agent + " train", row.train);
      print_kpis(out, row.agent + " eval ", row.eval);
    }
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"VNF orchestration simulator and learning benchmark"};
  app.require_subcommand(1);

  CommonFlags train_flags, eval_flags, compare_flags;
  CLI::App* train = app.add_subcommand("train", "Train an agent, then evaluate it");
  add_common(train, train_flags, false);
  train->add_option("--checkpoint", train_flags.checkpoint, "Where to save the trained agent");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate an agent with exploration disabled");
  add_common(eval, eval_flags, false);
  eval->add_option("--checkpoint", eval_flags.checkpoint, "Checkpoint to load");

  CLI::App* cmp = app.add_subcommand("compare", "Run several agents on identical traffic");
  add_common(cmp, compare_flags, true);

  std::string validate_path;
  CLI::App* check = app.add_subcommand("validate-config", "Check a configuration document");
  check->add_option("--config", validate_path, "Configuration document")->required();

  std::string export_path;
  CLI::App* exporter = app.add_subcommand("export-defaults", "Print the default configuration document");
  exporter->add_option("--out", export_path, "Write to a file instead of standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (train->parsed()) return cmd_train(train_flags, false, out, err);
    if (eval->parsed()) return cmd_train(eval_flags, true, out, err);
    if (cmp->parsed()) return cmd_compare(compare_flags, out, err);
    if (check->parsed()) {
      load_config(validate_path);
      out << validate_path << ": ok\n";
      return 0;
    }
    if (exporter->parsed()) {
      const std::string doc = to_json(default_config()).dump(2) + "\n";
      if (export_path.empty()) {
        out << doc;
      } else {
        std::ofstream file(export_path);
        if (!file) throw std::runtime_error("cannot write " + export_path);
        file << doc;
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace vnflab::bench

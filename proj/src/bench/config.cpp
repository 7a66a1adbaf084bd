#include "vnflab/bench/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

namespace vnflab::bench {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    auto it = doc_.find(key);
    return it == doc_.end() ? nullptr : &*it;
  }

  std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void number(const std::string& key, double& out, bool required = false) {
    if (const json* v = fetch(key, required)) {
      if (!v->is_number()) throw ConfigError(path(key) + ": expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(path(key) + ": must be finite");
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& out, bool required = false) {
    if (const json* v = fetch(key, required)) {
      if (v->is_number_unsigned()) {
        out = static_cast<Int>(v->get<std::uint64_t>());
      } else if (v->is_number_integer()) {
        out = static_cast<Int>(v->get<std::int64_t>());
      } else {
        throw ConfigError(path(key) + ": expected an integer");
      }
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = fetch(key, false)) {
      if (!v->is_boolean()) throw ConfigError(path(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = fetch(key, false)) {
      if (!v->is_string()) throw ConfigError(path(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  void widths(const std::string& key, std::vector<Eigen::Index>& out) {
    if (const json* v = fetch(key, false)) {
      if (!v->is_array()) throw ConfigError(path(key) + ": expected an array of layer widths");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        const json& w = (*v)[i];
        if (!w.is_number_integer()) throw ConfigError(path(key) + "[" + std::to_string(i) + "]: expected an integer");
        out.push_back(static_cast<Eigen::Index>(w.get<std::int64_t>()));
      }
    }
  }

  void finish() const {
    for (auto it = doc_.begin(); it != doc_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(path(it.key()) + ": unknown key");
  }

 private:
  const json* fetch(const std::string& key, bool required) {
    const json* v = child(key);
    if (!v && required) throw ConfigError(path(key) + ": missing required key");
    return v;
  }

  const json& doc_;
  std::string path_;
  std::set<std::string> seen_;
};

sim::VnfSpec make_vnf(int id, double c0, double cr, double dc, double m0, double mr, double dm, double qmin,
                      double qmax, double gamma, double mu, double sigma) {
  sim::VnfSpec v;
  v.id = id;
  v.c0 = c0, v.cr = cr, v.dc = dc;
  v.m0 = m0, v.mr = mr, v.dm = dm;
  v.qos_min = qmin, v.qos_max = qmax;
  v.gamma_sla = gamma;
  v.mu_arr = mu, v.sigma_arr = sigma;
  v.p_stay = 0.5;
  return v;
}

void read_pat(ObjectReader& r, agents::PatConfig& c) {
  r.number("gamma", c.gamma);
  r.number("tau", c.tau);
  r.number("eps", c.eps);
  r.number("eps_min", c.eps_min);
  r.number("eps_decay", c.eps_decay);
  r.number("lr", c.lr);
  r.number("sigma_noise", c.sigma_noise);
  r.number("clip_c", c.clip_c);
  r.number("clip_c_min", c.clip_c_min);
  r.number("beta", c.beta);
  r.number("gamma_max", c.gamma_max);
  r.integer("batch_size", c.batch_size);
  r.integer("buffer_capacity", c.buffer_capacity);
  r.integer("warmup_size", c.warmup_size);
  r.integer("updates_per_epoch", c.updates_per_epoch);
  r.widths("hidden", c.hidden);
  r.number("init_std", c.init_std);
  r.finish();
}

void read_baseline(ObjectReader& r, agents::BaselineConfig& c) {
  r.number("gamma", c.gamma);
  r.number("tau", c.tau);
  r.number("eps", c.eps);
  r.number("eps_min", c.eps_min);
  r.number("eps_decay", c.eps_decay);
  r.number("lr", c.lr);
  r.number("sigma_noise", c.sigma_noise);
  r.number("clip_c", c.clip_c);
  r.number("clip_c_min", c.clip_c_min);
  r.integer("batch_size", c.batch_size);
  r.integer("buffer_capacity", c.buffer_capacity);
  r.integer("warmup_size", c.warmup_size);
  r.integer("updates_per_epoch", c.updates_per_epoch);
  r.number("resolution", c.resolution);
  r.integer("alternation_period", c.alternation_period);
  r.widths("hidden", c.hidden);
  r.number("init_std", c.init_std);
  r.finish();
}

json pat_json(const agents::PatConfig& c) {
  return {{"gamma", c.gamma},
          {"tau", c.tau},
          {"eps", c.eps},
          {"eps_min", c.eps_min},
          {"eps_decay", c.eps_decay},
          {"lr", c.lr},
          {"sigma_noise", c.sigma_noise},
          {"clip_c", c.clip_c},
          {"clip_c_min", c.clip_c_min},
          {"beta", c.beta},
          {"gamma_max", c.gamma_max},
          {"batch_size", c.batch_size},
          {"buffer_capacity", c.buffer_capacity},
          {"warmup_size", c.warmup_size},
          {"updates_per_epoch", c.updates_per_epoch},
          {"hidden", c.hidden},
          {"init_std", c.init_std}};
}

json baseline_json(const agents::BaselineConfig& c) {
  return {{"gamma", c.gamma},
          {"tau", c.tau},
          {"eps", c.eps},
          {"eps_min", c.eps_min},
          {"eps_decay", c.eps_decay},
          {"lr", c.lr},
          {"sigma_noise", c.sigma_noise},
          {"clip_c", c.clip_c},
          {"clip_c_min", c.clip_c_min},
          {"batch_size", c.batch_size},
          {"buffer_capacity", c.buffer_capacity},
          {"warmup_size", c.warmup_size},
          {"updates_per_epoch", c.updates_per_epoch},
          {"resolution", c.resolution},
          {"alternation_period", c.alternation_period},
          {"hidden", c.hidden},
          {"init_std", c.init_std}};
}

void check(bool ok, const std::string& path, const std::string& what) {
  if (!ok) throw ConfigError(path + ": " + what);
}

}  // namespace

const char* agent_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::pat: return "pat";
    case AgentKind::greedy: return "greedy";
    case AgentKind::cloud: return "cloud";
    case AgentKind::random: return "random";
    case AgentKind::ddqn: return "ddqn";
    case AgentKind::ddpg: return "ddpg";
  }
  return "?";
}

AgentKind parse_agent(const std::string& name) {
  for (AgentKind k : {AgentKind::pat, AgentKind::greedy, AgentKind::cloud, AgentKind::random, AgentKind::ddqn,
                      AgentKind::ddpg})
    if (name == agent_name(k)) return k;
  throw ConfigError("agent.kind: unknown agent '" + name + "' (expected pat, greedy, cloud, random, ddqn or ddpg)");
}

sim::SystemModel ExperimentConfig::model() const {
  sim::SystemModel m;
  m.pool = pool;
  m.pool.n_vnfs = static_cast<int>(vnfs.size());
  m.vnfs = vnfs;
  m.costs = costs;
  m.traffic = traffic;
  m.psi.beta = agent.pat.beta;
  m.psi.gamma_max = agent.pat.gamma_max;
  return m;
}

bool ExperimentConfig::same_system(const ExperimentConfig& other) const {
  return pool.k_servers == other.pool.k_servers && pool.rho_max == other.pool.rho_max &&
         pool.eta_max == other.pool.eta_max && vnfs == other.vnfs && costs == other.costs &&
         traffic == other.traffic;
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.vnfs = {
      make_vnf(1, 3, 5, 4, 6, 5, 3, 35, 70, 2, 2, 1.5),   make_vnf(2, 2, 3, 2, 4, 4, 2, 36, 80, 2, 2.5, 0.2),
      make_vnf(3, 1, 4, 2, 2, 3, 2, 27, 63, 2, 4, 0.5),   make_vnf(4, 1, 4, 3, 1, 3, 1, 40, 90, 2, 1, 1),
      make_vnf(5, 2, 6, 2, 3, 4, 3, 20, 100, 2, 2.5, 1),  make_vnf(6, 1, 2, 1, 0, 3, 2, 5, 30, 2, 2, 1.5),
      make_vnf(7, 2, 3, 2, 2, 5, 3, 56, 80, 2, 5, 1),     make_vnf(8, 3, 4, 2, 3, 6, 5, 20, 53, 2, 2, 1),
      make_vnf(9, 1, 4, 3, 4, 4, 2, 40, 90, 2, 3, 0.5),   make_vnf(10, 2, 6, 2, 3, 4, 3, 20, 100, 2, 2, 1),
  };
  c.pool.n_vnfs = static_cast<int>(c.vnfs.size());
  return c;
}

ExperimentConfig scaled_config(int servers, int vnfs) {
  ExperimentConfig c = default_config();
  if (vnfs < 1 || vnfs > static_cast<int>(c.vnfs.size())) throw ConfigError("vnfs: unsupported catalogue size");
  c.vnfs.resize(static_cast<std::size_t>(vnfs));
  c.pool.k_servers = servers;
  c.pool.n_vnfs = vnfs;
  return c;
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c = default_config();
  ObjectReader root(doc, "");

  if (const json* v = root.child("pool")) {
    ObjectReader r(*v, "pool");
    r.integer("k_servers", c.pool.k_servers);
    r.number("rho_max", c.pool.rho_max);
    r.number("eta_max", c.pool.eta_max);
    int n_vnfs = -1;
    r.integer("n_vnfs", n_vnfs);
    r.finish();
    c.pool.n_vnfs = n_vnfs;  // checked against the catalogue below
  } else {
    c.pool.n_vnfs = -1;
  }

  if (const json* v = root.child("vnfs")) {
    if (!v->is_array()) throw ConfigError("vnfs: expected an array");
    c.vnfs.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      ObjectReader r((*v)[i], "vnfs[" + std::to_string(i) + "]");
      sim::VnfSpec s;
      s.id = static_cast<int>(i) + 1;
      r.integer("id", s.id);
      r.number("c0", s.c0, true);
      r.number("cr", s.cr, true);
      r.number("dc", s.dc, true);
      r.number("m0", s.m0, true);
      r.number("mr", s.mr, true);
      r.number("dm", s.dm, true);
      r.number("qos_min", s.qos_min, true);
      r.number("qos_max", s.qos_max, true);
      r.number("gamma_sla", s.gamma_sla, true);
      r.number("mu_arr", s.mu_arr, true);
      r.number("sigma_arr", s.sigma_arr, true);
      r.number("p_stay", s.p_stay);
      r.finish();
      c.vnfs.push_back(s);
    }
  }
  if (c.pool.n_vnfs >= 0 && c.pool.n_vnfs != static_cast<int>(c.vnfs.size()))
    throw ConfigError("pool.n_vnfs: does not match the number of entries in vnfs");
  c.pool.n_vnfs = static_cast<int>(c.vnfs.size());

  if (const json* v = root.child("costs")) {
    ObjectReader r(*v, "costs");
    r.number("d_rc", c.costs.d_rc);
    r.number("d_rm", c.costs.d_rm);
    r.number("d_db", c.costs.d_db);
    r.number("d_dt", c.costs.d_dt);
    r.number("c_rp", c.costs.c_rp);
    r.number("c_rm", c.costs.c_rm);
    r.number("c_i0", c.costs.c_i0);
    r.number("c_iv", c.costs.c_iv);
    r.number("c_c0", c.costs.c_c0);
    r.number("c_cv", c.costs.c_cv);
    r.number("w1", c.costs.w1);
    r.number("w2", c.costs.w2);
    r.number("w3", c.costs.w3);
    r.number("unit_b", c.costs.unit_b);
    r.number("unit_c", c.costs.unit_c);
    r.finish();
  }

  if (const json* v = root.child("traffic")) {
    ObjectReader r(*v, "traffic");
    r.integer("t_max", c.traffic.t_max);
    r.number("mu_r", c.traffic.mu_r);
    r.number("sigma_r", c.traffic.sigma_r);
    r.number("r_min", c.traffic.r_min);
    r.number("slot_T", c.traffic.slot_T);
    r.finish();
  }

  if (const json* v = root.child("agent")) {
    ObjectReader r(*v, "agent");
    std::string kind = agent_name(c.agent.kind);
    r.string("kind", kind);
    c.agent.kind = parse_agent(kind);
    if (const json* p = r.child("pat")) {
      ObjectReader pr(*p, "agent.pat");
      read_pat(pr, c.agent.pat);
    }
    if (const json* p = r.child("ddqn")) {
      ObjectReader pr(*p, "agent.ddqn");
      read_baseline(pr, c.agent.ddqn);
    }
    if (const json* p = r.child("ddpg")) {
      ObjectReader pr(*p, "agent.ddpg");
      read_baseline(pr, c.agent.ddpg);
    }
    r.finish();
  }

  if (const json* v = root.child("run")) {
    ObjectReader r(*v, "run");
    if (const json* s = r.child("seed"); s && !s->is_null()) {
      if (!s->is_number_integer() || (s->is_number_integer() && !s->is_number_unsigned() && s->get<std::int64_t>() < 0))
        throw ConfigError("run.seed: expected a non-negative integer");
      c.run.seed = s->get<std::uint64_t>();
    }
    r.integer("total_epochs", c.run.total_epochs);
    r.integer("eval_epochs", c.run.eval_epochs);
    r.integer("metrics_every", c.run.metrics_every);
    r.string("checkpoint_path", c.run.checkpoint_path);
    r.integer("smoothing_window", c.run.smoothing_window);
    r.boolean("snapshots", c.run.snapshots);
    r.finish();
  }
  root.finish();

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open configuration file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": malformed document: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json vnfs = json::array();
  for (const sim::VnfSpec& s : c.vnfs) {
    vnfs.push_back({{"id", s.id},
                    {"c0", s.c0},
                    {"cr", s.cr},
                    {"dc", s.dc},
                    {"m0", s.m0},
                    {"mr", s.mr},
                    {"dm", s.dm},
                    {"qos_min", s.qos_min},
                    {"qos_max", s.qos_max},
                    {"gamma_sla", s.gamma_sla},
                    {"mu_arr", s.mu_arr},
                    {"sigma_arr", s.sigma_arr},
                    {"p_stay", s.p_stay}});
  }
  json run = {{"total_epochs", c.run.total_epochs},
              {"eval_epochs", c.run.eval_epochs},
              {"metrics_every", c.run.metrics_every},
              {"checkpoint_path", c.run.checkpoint_path},
              {"smoothing_window", c.run.smoothing_window},
              {"snapshots", c.run.snapshots}};
  run["seed"] = c.run.seed ? json(*c.run.seed) : json(nullptr);
  return {
      {"pool",
       {{"k_servers", c.pool.k_servers},
        {"rho_max", c.pool.rho_max},
        {"eta_max", c.pool.eta_max},
        {"n_vnfs", static_cast<int>(c.vnfs.size())}}},
      {"vnfs", vnfs},
      {"costs",
       {{"d_rc", c.costs.d_rc},
        {"d_rm", c.costs.d_rm},
        {"d_db", c.costs.d_db},
        {"d_dt", c.costs.d_dt},
        {"c_rp", c.costs.c_rp},
        {"c_rm", c.costs.c_rm},
        {"c_i0", c.costs.c_i0},
        {"c_iv", c.costs.c_iv},
        {"c_c0", c.costs.c_c0},
        {"c_cv", c.costs.c_cv},
        {"w1", c.costs.w1},
        {"w2", c.costs.w2},
        {"w3", c.costs.w3},
        {"unit_b", c.costs.unit_b},
        {"unit_c", c.costs.unit_c}}},
      {"traffic",
       {{"t_max", c.traffic.t_max},
        {"mu_r", c.traffic.mu_r},
        {"sigma_r", c.traffic.sigma_r},
        {"r_min", c.traffic.r_min},
        {"slot_T", c.traffic.slot_T}}},
      {"agent",
       {{"kind", agent_name(c.agent.kind)},
        {"pat", pat_json(c.agent.pat)},
        {"ddqn", baseline_json(c.agent.ddqn)},
        {"ddpg", baseline_json(c.agent.ddpg)}}},
      {"run", run},
  };
}

void validate(const ExperimentConfig& c) {
  check(c.pool.k_servers >= 1, "pool.k_servers", "must be at least 1");
  check(c.pool.rho_max > 0, "pool.rho_max", "must be positive");
  check(c.pool.eta_max > 0, "pool.eta_max", "must be positive");
  check(!c.vnfs.empty(), "vnfs", "must list at least one function");
  for (std::size_t i = 0; i < c.vnfs.size(); ++i) {
    const sim::VnfSpec& s = c.vnfs[i];
    const std::string p = "vnfs[" + std::to_string(i) + "]";
    check(s.c0 >= 0 && s.m0 >= 0, p, "offsets c0 and m0 must be non-negative");
    check(s.dc >= 0 && s.cr > s.dc, p, "need cr > dc >= 0");
    check(s.dm >= 0 && s.mr > s.dm, p, "need mr > dm >= 0");
    check(s.qos_min >= 0 && s.qos_min <= s.qos_max, p, "need 0 <= qos_min <= qos_max");
    check(s.gamma_sla >= 0, p + ".gamma_sla", "must be non-negative");
    check(s.sigma_arr >= 0, p + ".sigma_arr", "must be non-negative");
    check(s.p_stay >= 0 && s.p_stay <= 1, p + ".p_stay", "must lie in [0, 1]");
  }
  const sim::CostParams& k = c.costs;
  for (auto [v, name] : {std::pair{k.d_rc, "d_rc"}, {k.d_rm, "d_rm"}, {k.d_db, "d_db"}, {k.d_dt, "d_dt"},
                         {k.c_rp, "c_rp"}, {k.c_rm, "c_rm"}, {k.c_i0, "c_i0"}, {k.c_iv, "c_iv"},
                         {k.c_c0, "c_c0"}, {k.c_cv, "c_cv"}, {k.unit_b, "unit_b"}, {k.unit_c, "unit_c"}})
    check(v >= 0, std::string("costs.") + name, "must be non-negative");
  check(k.w1 > 0 && k.w2 > 0 && k.w3 > 0, "costs", "weights w1, w2, w3 must be positive");
  check(c.traffic.t_max >= 1, "traffic.t_max", "must be at least 1");
  check(c.traffic.r_min > 0, "traffic.r_min", "must be positive");
  check(c.traffic.slot_T > 0, "traffic.slot_T", "must be positive");
  check(c.traffic.sigma_r >= 0, "traffic.sigma_r", "must be non-negative");
  check(c.run.total_epochs >= 1, "run.total_epochs", "must be at least 1");
  check(c.run.eval_epochs >= 0, "run.eval_epochs", "must be non-negative");
  check(c.run.metrics_every >= 1, "run.metrics_every", "must be at least 1");
  check(c.run.smoothing_window >= 1, "run.smoothing_window", "must be at least 1");
  auto nested = [](const std::string& path, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path + ": " + e.what());
    }
  };
  nested("agent.pat", [&] { c.agent.pat.validate(); });
  nested("agent.ddqn", [&] { c.agent.ddqn.validate(); });
  nested("agent.ddpg", [&] { c.agent.ddpg.validate(); });
}

std::uint64_t resolve_seed(const ExperimentConfig& config, std::optional<std::uint64_t> override_seed) {
  if (override_seed) return *override_seed;
  if (config.run.seed) return *config.run.seed;
  if (const char* env = std::getenv("VNF_LAB_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return v;
    throw ConfigError(std::string("VNF_LAB_SEED: not an unsigned integer: '") + env + "'");
  }
  return 1;
}

}  // namespace vnflab::bench

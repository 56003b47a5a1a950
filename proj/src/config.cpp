#include "qisac/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "qisac/angles.hpp"
#include "qisac/errors.hpp"

namespace qisac {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void read_number(const json& obj, const char* key, double& out, const std::string& where) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_number()) throw ConfigError(where + "." + key + " must be a number");
  out = obj.at(key).get<double>();
}

void read_count(const json& obj, const char* key, std::uint64_t& out, const std::string& where) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    throw ConfigError(where + "." + key + " must be a non-negative integer");
  out = v.get<std::uint64_t>();
}

void read_int(const json& obj, const char* key, int& out, const std::string& where) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  out = obj.at(key).get<int>();
}

std::uint64_t env_seed() {
  const char* raw = std::getenv("QISAC_SEED");
  if (!raw || !*raw) return 0;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(raw, &used, 0);
    if (used != std::string(raw).size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("QISAC_SEED is not an unsigned integer: ") + raw);
  }
}

InitPolicy to_policy(const InitConfig& init) {
  if (init.policy == "multistart") return MultiStartInit{init.starts};
  if (init.policy == "random") return RandomInit{init.seed};
  return FixedInit{deg_to_rad(init.theta_deg)};
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  reject_unknown(doc, "config", {"channel", "algo", "experiment", "sweep"});
  RunConfig cfg;

  if (doc.contains("channel")) {
    const json& ch = doc.at("channel");
    reject_unknown(ch, "channel", {"E", "eta", "Na", "theta_deg"});
    read_number(ch, "E", cfg.E, "channel");
    read_number(ch, "eta", cfg.eta, "channel");
    read_number(ch, "Na", cfg.Na, "channel");
    read_number(ch, "theta_deg", cfg.theta_deg, "channel");
  }

  if (!doc.contains("algo")) throw ConfigError("config needs an 'algo' section");
  const json& algo = doc.at("algo");
  reject_unknown(algo, "algo",
                 {"gamma_frac", "gamma_abs", "lambda", "eps", "t_max", "l_max", "newton_max",
                  "newton_tol", "psi0_deg", "block_refresh", "warm_start", "init"});
  if (algo.contains("gamma_frac")) {
    double v = 0.0;
    read_number(algo, "gamma_frac", v, "algo");
    cfg.gamma_frac = v;
  }
  if (algo.contains("gamma_abs")) {
    double v = 0.0;
    read_number(algo, "gamma_abs", v, "algo");
    cfg.gamma_abs = v;
  }
  if (cfg.gamma_frac.has_value() == cfg.gamma_abs.has_value())
    throw ConfigError("algo needs exactly one of gamma_frac / gamma_abs");
  read_number(algo, "lambda", cfg.lambda, "algo");
  read_number(algo, "eps", cfg.eps, "algo");
  read_int(algo, "t_max", cfg.t_max, "algo");
  read_int(algo, "l_max", cfg.l_max, "algo");
  read_int(algo, "newton_max", cfg.newton_max, "algo");
  read_number(algo, "newton_tol", cfg.newton_tol, "algo");
  read_number(algo, "psi0_deg", cfg.psi0_deg, "algo");
  read(algo, "block_refresh", cfg.block_refresh, "algo");
  read(algo, "warm_start", cfg.warm_start, "algo");
  if (algo.contains("init")) {
    const json& init = algo.at("init");
    reject_unknown(init, "algo.init", {"policy", "starts", "seed", "theta_deg"});
    read(init, "policy", cfg.init.policy, "algo.init");
    read_int(init, "starts", cfg.init.starts, "algo.init");
    read_count(init, "seed", cfg.init.seed, "algo.init");
    read_number(init, "theta_deg", cfg.init.theta_deg, "algo.init");
    if (cfg.init.policy != "multistart" && cfg.init.policy != "random" &&
        cfg.init.policy != "fixed")
      throw ConfigError("algo.init.policy must be multistart, random or fixed");
  }

  bool have_seed = false;
  if (doc.contains("experiment")) {
    const json& ex = doc.at("experiment");
    reject_unknown(ex, "experiment", {"n_block", "trials", "seed", "steady_fraction"});
    read_count(ex, "n_block", cfg.n_block, "experiment");
    read_count(ex, "trials", cfg.trials, "experiment");
    have_seed = ex.contains("seed");
    read_count(ex, "seed", cfg.seed, "experiment");
    read_number(ex, "steady_fraction", cfg.steady_fraction, "experiment");
  }
  if (!have_seed) cfg.seed = env_seed();

  if (doc.contains("sweep")) {
    const json& sweep = doc.at("sweep");
    if (!sweep.is_array()) throw ConfigError("sweep must be a list");
    for (const json& item : sweep) {
      reject_unknown(item, "sweep entry", {"gamma_frac", "Na", "N"});
      SweepEntry e;
      e.Na = cfg.Na;
      e.N = cfg.n_block;
      if (!item.contains("gamma_frac")) throw ConfigError("sweep entry needs gamma_frac");
      read_number(item, "gamma_frac", e.gamma_frac, "sweep");
      read_number(item, "Na", e.Na, "sweep");
      read_count(item, "N", e.N, "sweep");
      cfg.sweep.push_back(e);
    }
  }

  // Range checks live on the radian-valued spec types.
  to_experiment_spec(cfg).validate();
  return cfg;
}

RunConfig parse_run_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_run_config(doc);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config_text(buf.str());
}

json echo_run_config(const RunConfig& c) {
  json algo = {{"lambda", c.lambda},
               {"eps", c.eps},
               {"t_max", c.t_max},
               {"l_max", c.l_max},
               {"newton_max", c.newton_max},
               {"newton_tol", c.newton_tol},
               {"psi0_deg", c.psi0_deg},
               {"block_refresh", c.block_refresh},
               {"warm_start", c.warm_start},
               {"init",
                {{"policy", c.init.policy},
                 {"starts", c.init.starts},
                 {"seed", c.init.seed},
                 {"theta_deg", c.init.theta_deg}}}};
  if (c.gamma_frac) algo["gamma_frac"] = *c.gamma_frac;
  if (c.gamma_abs) algo["gamma_abs"] = *c.gamma_abs;

  json sweep = json::array();
  for (const SweepEntry& e : c.sweep)
    sweep.push_back({{"gamma_frac", e.gamma_frac}, {"Na", e.Na}, {"N", e.N}});

  json doc = {{"channel", {{"E", c.E}, {"eta", c.eta}, {"Na", c.Na}, {"theta_deg", c.theta_deg}}},
              {"algo", algo},
              {"experiment",
               {{"n_block", c.n_block},
                {"trials", c.trials},
                {"seed", c.seed},
                {"steady_fraction", c.steady_fraction}}}};
  if (!c.sweep.empty()) doc["sweep"] = sweep;
  return doc;
}

ExperimentSpec to_experiment_spec(const RunConfig& c) {
  ExperimentSpec spec;
  spec.params = {c.E, c.eta, c.Na, deg_to_rad(c.theta_deg)};
  AlgoConfig& a = spec.algo;
  a.gamma_is_fraction = c.gamma_frac.has_value();
  a.gamma_min = c.gamma_frac ? *c.gamma_frac : c.gamma_abs.value_or(0.0);
  a.lambda = c.lambda;
  a.eps = c.eps;
  a.t_max = c.t_max;
  a.psi0 = deg_to_rad(c.psi0_deg);
  a.refresh = c.block_refresh ? BlockRefresh::Redraw : BlockRefresh::Reuse;
  a.warm_start = c.warm_start;
  a.em.eps = c.eps;
  a.em.l_max = c.l_max;
  a.em.newton_max = c.newton_max;
  a.em.newton_tol = c.newton_tol;
  a.em.init = to_policy(c.init);
  spec.n_block = static_cast<std::size_t>(c.n_block);
  spec.trials = static_cast<std::size_t>(c.trials);
  spec.seed = c.seed;
  spec.steady_fraction = c.steady_fraction;
  for (const SweepEntry& e : c.sweep)
    spec.sweep.push_back({e.gamma_frac, e.Na, static_cast<std::size_t>(e.N)});
  return spec;
}

}  // namespace qisac

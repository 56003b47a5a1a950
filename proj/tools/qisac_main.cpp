// qisac: command-line front end.
//
//   qisac analytics --E 10 --eta 0.8 --Na 3 --N 1000 --grid 181
//   qisac run   configs/fig2.cfg --out-dir out/fig2
//   qisac sweep configs/fig4.cfg --out-dir out/fig4 --threads 4
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qisac/analytics.hpp"
#include "qisac/angles.hpp"
#include "qisac/config.hpp"
#include "qisac/controller.hpp"
#include "qisac/errors.hpp"
#include "qisac/montecarlo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qisac;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  unsigned threads = 0;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

fs::path prepare_out_dir(const GlobalOptions& g) {
  fs::path dir(g.out_dir);
  fs::create_directories(dir);
  return dir;
}

double median(std::vector<double> v) { return quantile_band(std::move(v)).median; }

// ---------------------------------------------------------------- analytics

struct AnalyticsOptions {
  double E = 10.0;
  double eta = 0.8;
  double Na = 3.0;
  std::uint64_t N = 1000;
  int grid = 181;
  int pareto_points = 51;
};

int cmd_analytics(const AnalyticsOptions& o, const GlobalOptions& g) {
  ChannelParams params{o.E, o.eta, o.Na, 0.0};
  params.validate();
  if (o.grid < 2) throw ConfigError("--grid must be >= 2");
  if (o.pareto_points < 2) throw ConfigError("--pareto-points must be >= 2");
  if (o.N < 1) throw ConfigError("--N must be >= 1");

  const FcMax peak = fc_max(params, o.N);
  const double bound = static_cast<double>(o.N) * params.amplitude() * params.amplitude() /
                       params.noise_var();

  const fs::path dir = prepare_out_dir(g);
  {
    CsvWriter csv(dir / "analytics.csv", {"phi_deg", "ber", "fisher", "fisher_high_snr"});
    for (int i = 0; i < o.grid; ++i) {
      const double phi_deg = 180.0 * i / (o.grid - 1);
      const double c = cos_deg(phi_deg);
      const double s = sin_deg(phi_deg);
      const double ber = q_function(params.snr_amplitude() * std::abs(c));
      const double hi_snr = params.amplitude() * params.amplitude() / params.noise_var() * s * s;
      csv.row({num(phi_deg), num(ber), num(fisher_at_offset(params, deg_to_rad(phi_deg))),
               num(hi_snr)});
    }
  }
  {
    CsvWriter csv(dir / "pareto.csv", {"gamma_frac", "gamma_min", "phi_star_deg", "ber"});
    for (int i = 0; i < o.pareto_points; ++i) {
      const double frac = static_cast<double>(i) / (o.pareto_points - 1);
      const ParetoPoint pp = pareto_known_theta(params, o.N, frac * peak.value, peak);
      csv.row({num(frac), num(pp.gamma_min), num(rad_to_deg(pp.phi_star)), num(pp.ber)});
    }
  }
  write_json(dir / "fc_max.json",
             {{"version", QISAC_VERSION},
              {"channel", {{"E", o.E}, {"eta", o.eta}, {"Na", o.Na}}},
              {"N", o.N},
              {"fc_max", peak.value},
              {"fisher_max_per_symbol", peak.per_symbol},
              {"phi_argmax_deg", rad_to_deg(peak.phi_argmax)},
              {"upper_bound", bound}});
  return 0;
}

// ---------------------------------------------------------------------- run

RunConfig load_with_overrides(const std::string& path, const GlobalOptions& g,
                              ExperimentSpec& spec) {
  RunConfig cfg = load_run_config(path);
  spec = to_experiment_spec(cfg);
  if (g.seed) spec.seed = *g.seed;
  spec.threads = g.threads;
  return cfg;
}

json steady_json(const SteadyState& s, double theta_true) {
  return {{"theta_hat_deg", rad_to_deg(s.theta_hat)},
          {"psi_deg", rad_to_deg(s.psi)},
          {"fc", s.fc},
          {"ber_emp", s.ber_emp},
          {"ber_theory", s.ber_theory},
          {"window", s.window},
          {"reflected_lock", is_reflected_lock(s, theta_true)}};
}

int cmd_run(const std::string& config_path, const GlobalOptions& g) {
  ExperimentSpec spec;
  const RunConfig cfg = load_with_overrides(config_path, g, spec);
  spec.validate();

  const ConvergenceResult result = run_convergence_experiment(spec);
  const double theta = spec.params.theta;

  const fs::path dir = prepare_out_dir(g);
  {
    CsvWriter csv(dir / "trace.csv", {"iter", "trial", "theta_hat_deg", "psi_deg", "fc", "fc_max",
                                      "ber_emp", "ber_theory", "target"});
    for (const TrialOutcome& t : result.trials) {
      if (!t.trace) continue;
      for (const IterationRecord& r : t.trace->records) {
        csv.row({std::to_string(r.iter), std::to_string(t.trial), num(rad_to_deg(r.theta_hat)),
                 num(rad_to_deg(r.psi)), num(r.fc), num(result.fc_max), num(r.ber_emp),
                 num(r.ber_theory), to_string(r.target)});
      }
    }
  }

  json per_trial = json::array();
  json failed = json::array();
  std::vector<double> psi, theta_err, fc, ber, ber_th;
  std::size_t reflected = 0;
  std::size_t s = 0;
  for (const TrialOutcome& t : result.trials) {
    if (!t.trace) {
      failed.push_back({{"trial", t.trial}, {"seed", t.seed}, {"error", t.error}});
      std::cerr << "trial " << t.trial << " failed: " << t.error << '\n';
      continue;
    }
    const SteadyState& st = result.steady[s++];
    json j = steady_json(st, theta);
    j["trial"] = t.trial;
    j["seed"] = t.seed;
    j["outer_iterations"] = t.trace->records.size();
    reflected += j["reflected_lock"].get<bool>();
    per_trial.push_back(j);
    psi.push_back(rad_to_deg(st.psi));
    theta_err.push_back(std::abs(rad_to_deg(wrap_pi(st.theta_hat - theta))));
    fc.push_back(st.fc);
    ber.push_back(st.ber_emp);
    ber_th.push_back(st.ber_theory);
  }

  json summary = {{"version", QISAC_VERSION},
                  {"config", echo_run_config(cfg)},
                  {"seed_used", spec.seed},
                  {"resolved",
                   {{"theta_rad", spec.params.theta},
                    {"psi0_rad", spec.algo.psi0},
                    {"amplitude", spec.params.amplitude()},
                    {"noise_var", spec.params.noise_var()},
                    {"fc_max", result.fc_max},
                    {"gamma_min", result.gamma_min},
                    {"threads", spec.threads}}},
                  {"trials_ok", per_trial.size()},
                  {"failed_trials", failed},
                  {"steady_state", per_trial}};
  if (!psi.empty()) {
    summary["median"] = {{"psi_deg", median(psi)},
                         {"abs_theta_error_deg", median(theta_err)},
                         {"fc", median(fc)},
                         {"ber_emp", median(ber)},
                         {"ber_theory", median(ber_th)}};
    summary["reflected_locks"] = reflected;
  }
  write_json(dir / "summary.json", summary);

  if (per_trial.empty()) {
    std::cerr << "all trials failed\n";
    return kExitNumerical;
  }
  return 0;
}

// -------------------------------------------------------------------- sweep

int cmd_sweep(const std::string& config_path, const GlobalOptions& g) {
  ExperimentSpec spec;
  const RunConfig cfg = load_with_overrides(config_path, g, spec);
  if (spec.sweep.empty()) throw ConfigError("sweep needs a non-empty 'sweep' list");
  spec.validate();

  const TradeoffCurve curve = run_tradeoff_sweep(spec);

  const fs::path dir = prepare_out_dir(g);
  json points = json::array();
  bool any_ok = false;
  {
    CsvWriter csv(dir / "sweep.csv",
                  {"gamma_frac", "Na", "N", "ber_sim", "ber_stderr", "ber_theory_known_theta"});
    for (const TradeoffPoint& p : curve.points) {
      const double nan = std::nan("");
      const bool ok = p.trials_ok > 0;
      any_ok = any_ok || ok;
      csv.row({num(p.point.gamma_frac), num(p.point.Na), std::to_string(p.point.N),
               num(ok ? p.ber_sim : nan), num(ok ? p.ber_stderr : nan),
               num(p.infeasible ? nan : p.ber_theory_known_theta)});
      points.push_back({{"gamma_frac", p.point.gamma_frac},
                        {"Na", p.point.Na},
                        {"N", p.point.N},
                        {"fc_max", p.fc_max},
                        {"gamma_min", p.gamma_min},
                        {"phi_star_deg", rad_to_deg(p.phi_star)},
                        {"trials_ok", p.trials_ok},
                        {"reflected_locks", p.reflected_locks},
                        {"infeasible", p.infeasible},
                        {"errors", p.errors}});
      for (const std::string& e : p.errors)
        std::cerr << "gamma_frac=" << p.point.gamma_frac << " Na=" << p.point.Na
                  << " N=" << p.point.N << ": " << e << '\n';
    }
  }
  write_json(dir / "sweep_summary.json", {{"version", QISAC_VERSION},
                                          {"config", echo_run_config(cfg)},
                                          {"seed_used", spec.seed},
                                          {"points", points}});
  return any_ok ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homodyne BPSK sensing/communication simulator", "qisac"};
  app.set_version_flag("--version", std::string(QISAC_VERSION));
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Master seed (overrides the config file and QISAC_SEED)");
  app.add_option("--out-dir", g.out_dir, "Directory for output files")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads for trials (0: all cores)")
      ->capture_default_str();

  AnalyticsOptions ao;
  auto* analytics = app.add_subcommand("analytics", "Closed-form BER, Fisher and trade-off tables");
  analytics->fallthrough();
  analytics->add_option("--E", ao.E, "Mean photon number per symbol")->capture_default_str();
  analytics->add_option("--eta", ao.eta, "Channel transmissivity")->capture_default_str();
  analytics->add_option("--Na", ao.Na, "Thermal photon number")->capture_default_str();
  analytics->add_option("--N", ao.N, "Block length for F_c")->capture_default_str();
  analytics->add_option("--grid", ao.grid, "Offset grid points over [0, 180] deg")
      ->capture_default_str();
  analytics->add_option("--pareto-points", ao.pareto_points, "gamma_frac grid points")
      ->capture_default_str();

  std::string run_config;
  auto* run = app.add_subcommand("run", "Convergence experiment");
  run->fallthrough();
  run->add_option("config", run_config, "Config file")->required();

  std::string sweep_config;
  auto* sweep = app.add_subcommand("sweep", "BER / Fisher trade-off sweep");
  sweep->fallthrough();
  sweep->add_option("config", sweep_config, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*analytics) return cmd_analytics(ao, g);
    if (*run) return cmd_run(run_config, g);
    return cmd_sweep(sweep_config, g);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

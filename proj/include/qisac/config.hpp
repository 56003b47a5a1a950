#pragma once

// Declarative run configuration. The file is a single JSON document; angles
// are in degrees and converted to radians only when building an ExperimentSpec.
//
//   {
//     "channel":    {"E": 10, "eta": 0.8, "Na": 3, "theta_deg": 45},
//     "algo":       {"gamma_frac": 0.6, "lambda": 0.01, "eps": 1e-3, "t_max": 500,
//                    "l_max": 500, "newton_max": 100, "newton_tol": 1e-3,
//                    "psi0_deg": 90, "block_refresh": true, "warm_start": true,
//                    "init": {"policy": "multistart", "starts": 8}},
//     "experiment": {"n_block": 1000, "trials": 50, "seed": 1, "steady_fraction": 0.2},
//     "sweep":      [{"gamma_frac": 0.1, "Na": 3, "N": 5000}]
//   }

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qisac/montecarlo.hpp"

namespace qisac {

struct InitConfig {
  std::string policy = "multistart";  // multistart | random | fixed
  int starts = 8;
  std::uint64_t seed = 0;
  double theta_deg = 0.0;

  bool operator==(const InitConfig&) const = default;
};

struct SweepEntry {
  double gamma_frac = 0.0;
  double Na = 3.0;
  std::uint64_t N = 1000;

  bool operator==(const SweepEntry&) const = default;
};

struct RunConfig {
  // channel
  double E = 10.0;
  double eta = 0.8;
  double Na = 3.0;
  double theta_deg = 45.0;
  // algo
  std::optional<double> gamma_frac;
  std::optional<double> gamma_abs;
  double lambda = 0.01;
  double eps = 1e-3;
  int t_max = 500;
  int l_max = 500;
  int newton_max = 100;
  double newton_tol = 1e-3;
  double psi0_deg = 90.0;
  bool block_refresh = true;
  bool warm_start = true;
  InitConfig init;
  // experiment
  std::uint64_t n_block = 1000;
  std::uint64_t trials = 50;
  std::uint64_t seed = 0;
  double steady_fraction = 0.2;
  std::vector<SweepEntry> sweep;

  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates a config document. Unknown keys, a missing or doubled
/// gamma_frac/gamma_abs and out-of-range values raise ConfigError. A missing
/// experiment.seed falls back to the QISAC_SEED environment variable, then 0.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig parse_run_config_text(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Fully resolved document (defaults filled in); parse_run_config accepts it.
nlohmann::json echo_run_config(const RunConfig& config);

/// Radian-valued spec for the harness.
ExperimentSpec to_experiment_spec(const RunConfig& config);

}  // namespace qisac

#pragma once

// Multi-trial experiment harness: convergence traces (one run_qisac per
// trial) and steady-state BER/Fisher trade-off sweeps.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qisac/analytics.hpp"
#include "qisac/angles.hpp"
#include "qisac/controller.hpp"
#include "qisac/physics.hpp"
#include "qisac/scoring.hpp"

namespace qisac {

struct SweepPoint {
  double gamma_frac = 0.0;
  double Na = 3.0;
  std::size_t N = 1000;
};

struct ExperimentSpec {
  ChannelParams params;
  AlgoConfig algo;
  std::size_t n_block = 1000;
  std::size_t trials = 50;
  std::uint64_t seed = 0;
  std::vector<SweepPoint> sweep;
  unsigned threads = 0;            // 0: hardware concurrency
  double steady_fraction = 0.2;    // trailing share of outer iterations averaged

  void validate() const;
};

/// Trailing-window averages of one trace.
struct SteadyState {
  double theta_hat = 0.0;  // circular mean modulo π, in [0, π)
  double psi = 0.0;        // circular mean modulo π, in [0, π)
  double fc = 0.0;
  double ber_emp = 0.0;
  double ber_theory = 0.0;
  std::size_t window = 0;
  std::size_t symbols = 0;  // symbols scored inside the window
};

SteadyState steady_state(const RunTrace& trace, double fraction);

/// True when the steady θ̂ is more than tol from θ (mod π): the run settled on
/// a solution other than the true phase, typically the mirror image 2ψ − θ.
bool is_reflected_lock(const SteadyState& s, double theta, double tol = 5.0 * kPi / 180.0);

struct TrialOutcome {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::optional<RunTrace> trace;  // empty on failure
  std::string error;
};

struct Band {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
};

/// Across-trial statistics of one outer iteration.
struct IterationSummary {
  int iter = 0;
  std::size_t trials = 0;
  Band theta_hat;
  Band psi;
  Band fc;
  Band ber_emp;
};

struct ConvergenceResult {
  double fc_max = 0.0;
  double gamma_min = 0.0;
  std::vector<TrialOutcome> trials;
  std::vector<IterationSummary> per_iteration;
  std::vector<SteadyState> steady;  // one per successful trial, in trial order

  std::size_t failed() const;
};

Band quantile_band(std::vector<double> values);

ConvergenceResult run_convergence_experiment(const ExperimentSpec& spec);

struct TradeoffPoint {
  SweepPoint point;
  double fc_max = 0.0;
  double gamma_min = 0.0;
  double ber_sim = 0.0;
  double ber_stderr = 0.0;
  double ber_theory_known_theta = 0.0;
  double phi_star = 0.0;
  std::size_t trials_ok = 0;
  std::size_t reflected_locks = 0;
  std::vector<SteadyState> steady;  // one per successful trial, in trial order
  bool infeasible = false;
  std::vector<std::string> errors;
};

struct TradeoffCurve {
  ChannelParams params;
  std::vector<TradeoffPoint> points;
};

/// For each sweep point: Γ_min = gamma_frac·F_c^max, `trials` QISAC runs, and
/// the trailing-window BER against the known-θ optimum.
TradeoffCurve run_tradeoff_sweep(const ExperimentSpec& spec);

/// Runs body(i) for i in [0, count) on `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace qisac

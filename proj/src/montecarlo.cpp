#include "qisac/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "qisac/angles.hpp"
#include "qisac/errors.hpp"
#include "qisac/rng.hpp"

namespace qisac {
namespace {

// Mean of angles defined modulo π, via the doubled-angle circular mean.
double circular_mean_mod_pi(std::span<const double> angles) {
  double s = 0.0, c = 0.0;
  for (double a : angles) {
    s += std::sin(2.0 * a);
    c += std::cos(2.0 * a);
  }
  return mod_pi(0.5 * std::atan2(s, c));
}

double quantile_sorted(const std::vector<double>& v, double q) {
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

std::vector<TrialOutcome> run_trials(const ExperimentSpec& spec, const ChannelParams& params,
                                     std::size_t n_block, double fc_max_value,
                                     std::uint64_t master) {
  std::vector<TrialOutcome> outcomes(spec.trials);
  parallel_for(spec.trials, spec.threads, [&](std::size_t k) {
    TrialOutcome& out = outcomes[k];
    out.trial = k;
    out.seed = stream_seed(master, k);
    try {
      AlgoConfig algo = spec.algo;
      if (const auto* rnd = std::get_if<RandomInit>(&algo.em.init))
        algo.em.init = RandomInit{stream_seed(rnd->seed, k)};
      const BlockSource source =
          algo.refresh == BlockRefresh::Redraw
              ? fresh_blocks(params, n_block, out.seed)
              : reused_block(params, algo.psi0, n_block, out.seed);
      out.trace = run_qisac(source, params, algo, fc_max_value);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });
  return outcomes;
}

}  // namespace

void ExperimentSpec::validate() const {
  params.validate();
  algo.validate();
  if (n_block < 1) throw ConfigError("n_block must be >= 1");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (!(steady_fraction > 0.0) || steady_fraction > 1.0)
    throw ConfigError("steady_fraction must lie in (0, 1]");
  for (const SweepPoint& p : sweep) {
    if (!(p.gamma_frac >= 0.0 && p.gamma_frac <= 1.0))
      throw ConfigError("sweep gamma_frac must lie in [0, 1]");
    if (!(p.Na >= 0.0)) throw ConfigError("sweep Na must be >= 0");
    if (p.N < 1) throw ConfigError("sweep N must be >= 1");
  }
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
}

SteadyState steady_state(const RunTrace& trace, double fraction) {
  SteadyState out;
  const std::size_t total = trace.records.size();
  if (total == 0) return out;
  const auto window = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(total))));
  std::vector<double> thetas, psis;
  double fc = 0.0, ber = 0.0, theory = 0.0;
  std::size_t fc_count = 0;
  for (std::size_t i = total - window; i < total; ++i) {
    const IterationRecord& r = trace.records[i];
    thetas.push_back(r.theta_hat);
    psis.push_back(r.psi);
    if (r.fc_ok) {
      fc += r.fc;
      ++fc_count;
    }
    ber += r.ber_emp;
    theory += r.ber_theory;
  }
  const auto w = static_cast<double>(window);
  out.window = window;
  out.symbols = window * trace.n_block;
  out.theta_hat = circular_mean_mod_pi(thetas);
  out.psi = circular_mean_mod_pi(psis);
  out.fc = fc_count ? fc / static_cast<double>(fc_count) : std::nan("");
  out.ber_emp = ber / w;
  out.ber_theory = theory / w;
  return out;
}

bool is_reflected_lock(const SteadyState& s, double theta, double tol) {
  return std::abs(wrap_pi(s.theta_hat - theta)) > tol;
}

Band quantile_band(std::vector<double> values) {
  if (values.empty()) return {};
  std::sort(values.begin(), values.end());
  return {quantile_sorted(values, 0.5), quantile_sorted(values, 0.25),
          quantile_sorted(values, 0.75)};
}

std::size_t ConvergenceResult::failed() const {
  return static_cast<std::size_t>(
      std::count_if(trials.begin(), trials.end(), [](const auto& t) { return !t.trace; }));
}

ConvergenceResult run_convergence_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ConvergenceResult result;
  result.fc_max = fc_max(spec.params, spec.n_block).value;
  result.gamma_min =
      spec.algo.gamma_is_fraction ? spec.algo.gamma_min * result.fc_max : spec.algo.gamma_min;
  result.trials = run_trials(spec, spec.params, spec.n_block, result.fc_max, spec.seed);

  std::size_t longest = 0;
  for (const TrialOutcome& t : result.trials) {
    if (!t.trace) continue;
    longest = std::max(longest, t.trace->records.size());
    result.steady.push_back(steady_state(*t.trace, spec.steady_fraction));
  }
  for (std::size_t i = 0; i < longest; ++i) {
    std::vector<double> theta, psi, fc, ber;
    for (const TrialOutcome& t : result.trials) {
      if (!t.trace || i >= t.trace->records.size()) continue;
      const IterationRecord& r = t.trace->records[i];
      theta.push_back(r.theta_hat);
      psi.push_back(r.psi);
      if (r.fc_ok) fc.push_back(r.fc);
      ber.push_back(r.ber_emp);
    }
    IterationSummary s;
    s.iter = static_cast<int>(i);
    s.trials = theta.size();
    s.theta_hat = quantile_band(std::move(theta));
    s.psi = quantile_band(std::move(psi));
    s.fc = quantile_band(std::move(fc));
    s.ber_emp = quantile_band(std::move(ber));
    result.per_iteration.push_back(s);
  }
  return result;
}

TradeoffCurve run_tradeoff_sweep(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.sweep.empty()) throw ConfigError("run_tradeoff_sweep: sweep list is empty");

  TradeoffCurve curve;
  curve.params = spec.params;
  for (std::size_t idx = 0; idx < spec.sweep.size(); ++idx) {
    const SweepPoint& sp = spec.sweep[idx];
    TradeoffPoint out;
    out.point = sp;
    ChannelParams params = spec.params;
    params.Na = sp.Na;

    const FcMax peak = fc_max(params, sp.N);
    out.fc_max = peak.value;
    out.gamma_min = sp.gamma_frac * peak.value;
    try {
      const ParetoPoint pp = pareto_known_theta(params, sp.N, out.gamma_min, peak);
      out.phi_star = pp.phi_star;
      out.ber_theory_known_theta = pp.ber;
    } catch (const InfeasibleError& e) {
      out.infeasible = true;
      out.errors.emplace_back(e.what());
      curve.points.push_back(out);
      continue;
    }

    ExperimentSpec point_spec = spec;
    point_spec.params = params;
    point_spec.n_block = sp.N;
    point_spec.algo.gamma_min = out.gamma_min;
    point_spec.algo.gamma_is_fraction = false;
    const auto outcomes =
        run_trials(point_spec, params, sp.N, peak.value, stream_seed(spec.seed, 1000003 + idx));

    std::vector<double> bers;
    for (const TrialOutcome& t : outcomes) {
      if (!t.trace) {
        out.errors.push_back("trial " + std::to_string(t.trial) + ": " + t.error);
        continue;
      }
      const SteadyState st = steady_state(*t.trace, spec.steady_fraction);
      out.reflected_locks += is_reflected_lock(st, params.theta);
      bers.push_back(st.ber_emp);
      out.steady.push_back(st);
    }
    out.trials_ok = bers.size();
    if (!bers.empty()) {
      double mean = 0.0;
      for (double b : bers) mean += b;
      mean /= static_cast<double>(bers.size());
      double ss = 0.0;
      for (double b : bers) ss += (b - mean) * (b - mean);
      out.ber_sim = mean;
      out.ber_stderr = bers.size() > 1
                           ? std::sqrt(ss / static_cast<double>(bers.size() - 1) /
                                       static_cast<double>(bers.size()))
                           : 0.0;
    }
    curve.points.push_back(out);
  }
  return curve;
}

}  // namespace qisac

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Tolerances are pinned here; nothing is read from the environment.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qisac/analytics.hpp"
#include "qisac/angles.hpp"
#include "qisac/config.hpp"
#include "qisac/controller.hpp"
#include "qisac/em.hpp"
#include "qisac/montecarlo.hpp"
#include "qisac/physics.hpp"

using namespace qisac;

namespace {

const ChannelParams kPaper{10.0, 0.8, 3.0, 0.0};
const ChannelParams kHighSnr{200.0, 1.0, 0.0, 0.0};

// Criterion tolerances.
constexpr double kBinomialSigmas = 3.0;
constexpr double kMcSigmas = 3.0;
constexpr double kDoublingRelTol = 1e-8;
constexpr double kHighSnrRelGap = 1e-3;
constexpr double kDominanceSlack = 1e-9;
constexpr double kArgmaxTolRad = 0.05;
constexpr double kGradRelTol = 1e-6;
constexpr double kHessRelTol = 1e-4;
constexpr double kLoglikSlack = 1e-9;
constexpr double kFcRelTol = 0.10;
constexpr double kThetaErrDeg = 2.0;
constexpr double kPsiLoDeg = 80.0;
constexpr double kPsiHiDeg = 90.0;
constexpr double kMonotoneSigmas = 2.0;
constexpr double kEndpointSigmas = 3.0;
constexpr double kOrderSigmas = 2.0;
constexpr double kContractionAbsTol = 1e-12;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  const Outcome o = body();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
              secs);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) { return quantile_band(std::move(v)).median; }

// ---------------------------------------------------------------------------

Outcome ber_consistency() {
  Outcome o;
  const std::size_t n = 1'000'000;
  for (double deg : {0.0, 30.0, 60.0}) {
    ChannelParams p = kPaper;
    p.theta = deg_to_rad(deg);
    const ObservationBlock b = sample_block(p, 0.0, n, 1000 + static_cast<int>(deg));
    // Known-phase ML detection: the sign of x against the sign of cos φ.
    const double sign = std::cos(p.theta) >= 0.0 ? 1.0 : -1.0;
    std::size_t errors = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Symbol decided = sign * b.x[i] >= 0.0 ? Symbol::Zero : Symbol::One;
      errors += decided != b.s_true[i];
    }
    const double emp = static_cast<double>(errors) / n;
    const double th = ber_theory(p, 0.0);
    const double se = oracle::binomial_stderr(th, n);
    const double z = (emp - th) / se;
    o.pass = o.pass && std::abs(z) <= kBinomialSigmas;
    o.detail += fmt("phi=%g deg emp=%.6f theory=%.6f z=%+.2f; ", deg, emp, th, z);
  }
  return o;
}

Outcome fisher_oracle() {
  Outcome o;
  const std::size_t trials = 1'000'000;
  for (double deg : {10.0, 30.0, 45.0, 60.0, 80.0}) {
    ChannelParams p = kPaper;
    p.theta = deg_to_rad(deg);
    const double quad = fisher_symbol(p, 0.0).per_symbol;
    const McEstimate mc = fisher_symbol_mc(p, 0.0, trials, 77 + static_cast<int>(deg));
    const double z = (mc.value - quad) / mc.stderr_;

    QuadratureOptions base;
    QuadratureOptions doubled;
    doubled.nodes = 2 * base.nodes;
    const double f1 = fisher_symbol(p, 0.0, 1, base).per_symbol;
    const double f2 = fisher_symbol(p, 0.0, 1, doubled).per_symbol;
    const double rel = std::abs(f1 - f2) / f2;

    o.pass = o.pass && std::abs(z) <= kMcSigmas && rel < kDoublingRelTol;
    o.detail += fmt("phi=%g quad=%.6f mc=%.6f z=%+.2f dbl=%.1e; ", deg, quad, mc.value, z, rel);
  }
  return o;
}

Outcome high_snr_limit() {
  Outcome o;
  for (double phi : {kPi / 4.0, kPi / 2.0}) {
    ChannelParams p = kHighSnr;
    p.theta = phi;
    const double exact = fisher_symbol(p, 0.0).per_symbol;
    const double limit = fisher_high_snr(p, 0.0);
    const double gap = std::abs(exact - limit) / limit;
    o.pass = o.pass && gap < kHighSnrRelGap;
    o.detail += fmt("phi=%.4f exact=%.6g hiSNR=%.6g gap=%.3g; ", phi, exact, limit, gap);
  }
  double worst = -1e300;
  for (int i = 0; i < 100; ++i) {
    ChannelParams p = kPaper;
    p.theta = kPi * i / 99.0;
    worst = std::max(worst, fisher_symbol(p, 0.0).per_symbol - fisher_high_snr(p, 0.0));
  }
  o.pass = o.pass && worst <= kDominanceSlack;
  o.detail += fmt("grid max(F-F_hiSNR)=%.3g", worst);
  return o;
}

Outcome optimal_angle_separation() {
  Outcome o;
  const FcMax peak = fc_max(kHighSnr, 1);
  const double dist = std::abs(kPi / 2.0 - peak.phi_argmax);
  o.pass = dist <= kArgmaxTolRad;
  o.detail = fmt("E=200 argmax=%.6f rad, |argmax-pi/2|=%.4f; ", peak.phi_argmax, dist);

  // BER is minimized at φ = 0: Q is decreasing and |cos φ| ≤ 1.
  const double at_zero = ber_theory(kPaper, 0.0);
  bool argmin_zero = at_zero == q_function(kPaper.snr_amplitude());
  for (int i = 1; i < 1800; ++i)
    argmin_zero = argmin_zero && ber_theory(kPaper, -kPi * i / 1800.0) > at_zero;
  o.pass = o.pass && argmin_zero;
  o.detail += fmt("BER argmin at phi=0: %s", argmin_zero ? "yes" : "no");
  return o;
}

Outcome em_correctness() {
  Outcome o;
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  std::uniform_int_distribution<int> size(100, 1000);

  double worst_g = 0.0, worst_h = 0.0;
  for (int k = 0; k < 100; ++k) {
    ChannelParams p = kPaper;
    p.theta = angle(rng);
    const double psi = angle(rng);
    const ObservationBlock b = sample_block(p, psi, size(rng), 5000 + k);
    const Responsibilities resp = e_step(b.x, p, psi, angle(rng));
    const double t = angle(rng) * 2.0 - kPi;

    const double hg = 1e-6;
    const double g_fd = (m_step_objective(b.x, p, psi, t + hg, resp) -
                         m_step_objective(b.x, p, psi, t - hg, resp)) /
                        (2.0 * hg);
    const double hh = 1e-4;
    const double h_fd = (m_step_objective(b.x, p, psi, t + hh, resp) -
                         2.0 * m_step_objective(b.x, p, psi, t, resp) +
                         m_step_objective(b.x, p, psi, t - hh, resp)) /
                        (hh * hh);
    const double g = m_step_gradient(b.x, p, psi, t, resp);
    const double h = m_step_hessian(b.x, p, psi, t, resp);
    worst_g = std::max(worst_g, std::abs(g - g_fd) / std::max(std::abs(g), 1.0));
    worst_h = std::max(worst_h, std::abs(h - h_fd) / std::max(std::abs(h), 1.0));
  }
  o.pass = worst_g <= kGradRelTol && worst_h <= kHessRelTol;
  o.detail = fmt("max rel err g=%.2e h=%.2e; ", worst_g, worst_h);

  double worst_drop = 0.0;
  std::size_t steps = 0;
  for (int seed = 0; seed < 100; ++seed) {
    ChannelParams p = kPaper;
    p.theta = angle(rng);
    const double psi = angle(rng);
    const ObservationBlock b = sample_block(p, psi, 1000, 9000 + seed);
    for (int s = 0; s < 8; ++s) {
      EmConfig cfg;
      cfg.init = FixedInit{kPi * s / 8.0};
      const EmResult r = run_em(b, p, psi, cfg);
      for (std::size_t i = 1; i < r.loglik_trace.size(); ++i) {
        const double prev = r.loglik_trace[i - 1];
        const double drop = (prev - r.loglik_trace[i]) / std::abs(prev);
        worst_drop = std::max(worst_drop, drop);
        ++steps;
      }
    }
  }
  o.pass = o.pass && worst_drop <= kLoglikSlack;
  o.detail += fmt("loglik max relative drop=%.2e over %zu EM steps", worst_drop, steps);
  return o;
}

Outcome convergence_regression() {
  Outcome o;
  const RunConfig cfg = load_run_config(QISAC_CONFIG_DIR "/fig2.cfg");
  ExperimentSpec spec = to_experiment_spec(cfg);
  if (spec.trials < 20) spec.trials = 20;
  const ConvergenceResult res = run_convergence_experiment(spec);
  const double theta = spec.params.theta;

  std::vector<double> psi, theta_err, fc;
  double ber_emp = 0.0, ber_th = 0.0;
  std::size_t symbols = 0, reflected = 0;
  for (const SteadyState& s : res.steady) {
    psi.push_back(rad_to_deg(s.psi));
    theta_err.push_back(std::abs(rad_to_deg(wrap_pi(s.theta_hat - theta))));
    reflected += is_reflected_lock(s, theta);
    fc.push_back(s.fc);
    ber_emp += s.ber_emp * s.symbols;
    ber_th += s.ber_theory * s.symbols;
    symbols += s.symbols;
  }
  ber_emp /= symbols;
  ber_th /= symbols;
  const double se = oracle::binomial_stderr(ber_th, symbols);
  const double m_psi = median(psi);
  const double m_err = median(theta_err);
  const double m_fc = median(fc);
  const double fc_rel = std::abs(m_fc - res.gamma_min) / res.gamma_min;
  const double z = (ber_emp - ber_th) / se;

  o.pass = res.failed() == 0 && res.steady.size() >= 20 && m_psi >= kPsiLoDeg &&
           m_psi <= kPsiHiDeg && m_err <= kThetaErrDeg && fc_rel <= kFcRelTol &&
           std::abs(z) <= kBinomialSigmas;
  o.detail = fmt(
      "trials=%zu failed=%zu median psi=%.2f deg, median |theta_err|=%.2f deg, median Fc/Gamma=%.4f,"
      " BER emp=%.5f theory=%.5f z=%+.2f; reflected locks %zu/%zu",
      res.trials.size(), res.failed(), m_psi, m_err, m_fc / res.gamma_min, ber_emp, ber_th, z,
      reflected, res.steady.size());
  return o;
}

Outcome pareto_tradeoff() {
  Outcome o;
  const RunConfig cfg = load_run_config(QISAC_CONFIG_DIR "/fig4.cfg");
  ExperimentSpec spec = to_experiment_spec(cfg);
  spec.trials = 20;
  spec.params.theta = deg_to_rad(30.0);
  const std::vector<double> grid{0.1, 0.3, 0.5, 0.7, 0.9};
  spec.sweep.clear();
  for (std::size_t n : {5000u, 50000u})
    for (double g : grid) spec.sweep.push_back(SweepPoint{g, 3.0, n});

  const TradeoffCurve curve = run_tradeoff_sweep(spec);
  const auto& pts = curve.points;
  const std::size_t k = grid.size();

  bool ok = true;
  std::string diag;
  for (const TradeoffPoint& p : pts) {
    ok = ok && p.trials_ok == spec.trials && !p.infeasible;
    // Diagnostic only: the mean over trials whose steady θ̂ sits on the true phase.
    double locked_ber = 0.0;
    std::size_t locked = 0;
    for (const SteadyState& st : p.steady) {
      if (is_reflected_lock(st, spec.params.theta)) continue;
      locked_ber += st.ber_emp;
      ++locked;
    }
    diag += fmt("N=%zu g=%.1f sim=%.5f+-%.5f known=%.5f off-truth locks=%zu/%zu (on-truth mean %.5f); ",
                p.point.N, p.point.gamma_frac, p.ber_sim, p.ber_stderr, p.ber_theory_known_theta,
                p.reflected_locks, p.trials_ok, locked ? locked_ber / locked : std::nan(""));
  }

  bool monotone = true;
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t i = 0; i + 1 < k; ++i) {
      const TradeoffPoint& a = pts[c * k + i];
      const TradeoffPoint& b = pts[c * k + i + 1];
      const double se = std::hypot(a.ber_stderr, b.ber_stderr);
      monotone = monotone && b.ber_sim >= a.ber_sim - kMonotoneSigmas * se;
    }
  }

  bool endpoints = true;
  for (std::size_t i : {std::size_t{0}, k - 1}) {
    const TradeoffPoint& p = pts[i];
    endpoints = endpoints && std::abs(p.ber_sim - p.ber_theory_known_theta) <=
                                 kEndpointSigmas * p.ber_stderr;
  }

  bool ordered = true;
  for (std::size_t i = 0; i < k; ++i) {
    const TradeoffPoint& small = pts[i];
    const TradeoffPoint& large = pts[k + i];
    ordered = ordered && large.ber_sim <= small.ber_sim +
                                              kOrderSigmas * std::hypot(small.ber_stderr,
                                                                        large.ber_stderr);
  }

  o.pass = ok && monotone && endpoints && ordered;
  o.detail = fmt("monotone=%s endpoints=%s N-ordering=%s trials_ok=%s; ", monotone ? "yes" : "no",
                 endpoints ? "yes" : "no", ordered ? "yes" : "no", ok ? "yes" : "no") +
             diag;
  return o;
}

Outcome controller_contract() {
  Outcome o;
  const PhaseEstimator truth = [](const ObservationBlock& b, const ChannelParams& p, double,
                                  const EmConfig&) {
    EmResult r;
    r.theta_raw = p.theta;
    r.theta_hat = mod_pi(p.theta);
    r.s_hat = b.s_true;
    return r;
  };

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> angle(0.0, kPi);
  double worst = 0.0;
  bool in_range = true;
  std::size_t steps = 0;
  for (double lambda : {0.01, 0.1, 0.5, 0.9, 1.0}) {
    for (int rep = 0; rep < 4; ++rep) {
      ChannelParams p = kPaper;
      p.theta = angle(rng);
      AlgoConfig cfg;
      cfg.gamma_min = 0.0;  // always feasible: the target stays at θ
      cfg.lambda = lambda;
      cfg.psi0 = angle(rng);
      cfg.t_max = 100;
      cfg.eps = 1e-300;
      const RunTrace tr = run_qisac(fresh_blocks(p, 8, rep), p, cfg, -1.0, truth);
      for (std::size_t t = 0; t < tr.records.size(); ++t) {
        const IterationRecord& r = tr.records[t];
        in_range = in_range && r.psi >= 0.0 && r.psi < kPi && r.psi_next >= 0.0 && r.psi_next < kPi;
        if (t + 1 < tr.records.size()) {
          const double expected = (1.0 - lambda) * std::abs(r.delta_psi);
          worst = std::max(worst, std::abs(std::abs(tr.records[t + 1].delta_psi) - expected));
          ++steps;
        }
      }
    }
  }
  for (int i = 0; i < 100000; ++i) {
    const double psi = update_psi(angle(rng), angle(rng) * 3.0 - kPi, 0.37);
    in_range = in_range && psi >= 0.0 && psi < kPi;
  }
  o.pass = worst <= kContractionAbsTol && in_range;
  o.detail = fmt("max |contraction error|=%.2e rad over %zu steps, psi in [0,pi): %s", worst, steps,
                 in_range ? "yes" : "no");
  return o;
}

}  // namespace

int main() {
  report(1, "BER formula consistency", ber_consistency);
  report(2, "Fisher oracle equivalence", fisher_oracle);
  report(3, "High-SNR Fisher limit", high_snr_limit);
  report(4, "Optimal-angle separation", optimal_angle_separation);
  report(5, "EM correctness", em_correctness);
  report(6, "Convergence regression (N=1000, theta=45 deg, Gamma=0.6 Fc_max)", convergence_regression);
  report(7, "Pareto trade-off", pareto_tradeoff);
  report(8, "Controller contraction", controller_contract);
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}

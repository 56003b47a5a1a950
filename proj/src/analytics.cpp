#include "qisac/analytics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "qisac/angles.hpp"
#include "qisac/errors.hpp"
#include "qisac/quadrature.hpp"
#include "qisac/rng.hpp"

namespace qisac {
namespace {

constexpr std::size_t kPanelOrder = 16;

const GaussLegendreRule& panel_rule() {
  static const GaussLegendreRule rule(kPanelOrder);
  return rule;
}

// Mixture geometry at a fixed effective offset.
struct Mixture {
  std::array<double, 2> mu;
  std::array<double, 2> dmu;
  double var;
  double log_norm;  // −½ log(2πσ²)

  Mixture(const ChannelParams& params, double psi) : var(params.noise_var()) {
    for (Symbol m : {Symbol::Zero, Symbol::One}) {
      mu[index(m)] = symbol_mean(params, psi, m);
      dmu[index(m)] = symbol_mean_deriv(params, psi, m);
    }
    log_norm = -0.5 * std::log(2.0 * kPi * var);
  }

  // Returns the score ∂θ log p(x) and writes the max-shifted log density.
  double score(double x, double& log_peak, double& weight_sum) const {
    const double l0 = -0.5 * (x - mu[0]) * (x - mu[0]) / var;
    const double l1 = -0.5 * (x - mu[1]) * (x - mu[1]) / var;
    log_peak = std::max(l0, l1);
    const double w0 = std::exp(l0 - log_peak);
    const double w1 = std::exp(l1 - log_peak);
    weight_sum = w0 + w1;
    return (w0 * (x - mu[0]) * dmu[0] + w1 * (x - mu[1]) * dmu[1]) / (var * weight_sum);
  }

  // Integrand [Σ Nₘ aₘ]² / Σ Nₘ, evaluated as exp(c + M)·s²·Σw so that far
  // tails go to zero instead of 0/0.
  double fisher_integrand(double x) const {
    double log_peak = 0.0, weight_sum = 0.0;
    const double s = score(x, log_peak, weight_sum);
    if (s == 0.0) return 0.0;
    return std::exp(log_norm + log_peak) * weight_sum * s * s;
  }
};

double integrate_fisher(const Mixture& mix, double lo, double hi, std::size_t nodes) {
  const std::size_t panels = nodes / kPanelOrder;
  return 0.5 * integrate_composite([&](double x) { return mix.fisher_integrand(x); }, lo, hi,
                                   panels, panel_rule());
}

double golden_section_max(auto&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double ber_theory(const ChannelParams& params, double psi) {
  return q_function(params.snr_amplitude() * std::abs(std::cos(params.theta - psi)));
}

FisherReport fisher_symbol(const ChannelParams& params, double psi, std::size_t n,
                           const QuadratureOptions& opts) {
  params.validate();
  if (opts.nodes < kPanelOrder || opts.nodes % kPanelOrder != 0)
    throw ConfigError("quadrature node count must be a positive multiple of 16");

  const Mixture mix(params, psi);
  const double sigma = params.noise_std();
  const double lo = std::min(mix.mu[0], mix.mu[1]) - opts.span_sigmas * sigma;
  const double hi = std::max(mix.mu[0], mix.mu[1]) + opts.span_sigmas * sigma;
  // Absolute floor so that F ≡ 0 (φ = 0) does not demand relative accuracy on noise.
  const double abs_floor = 1e-14 * params.amplitude() * params.amplitude() / params.noise_var();

  std::size_t nodes = opts.nodes;
  double coarse = integrate_fisher(mix, lo, hi, nodes);
  while (true) {
    const double fine = integrate_fisher(mix, lo, hi, 2 * nodes);
    const double err = std::abs(fine - coarse);
    if (err <= opts.rel_tol * std::abs(fine) + abs_floor) {
      FisherReport report;
      report.per_symbol = std::max(fine, 0.0);
      report.n = n;
      report.block = static_cast<double>(n) * report.per_symbol;
      report.quad_nodes = 2 * nodes;
      report.quad_error_est = err;
      return report;
    }
    nodes *= 2;
    if (2 * nodes > opts.max_nodes)
      throw QuadratureError("fisher_symbol: no convergence at " + std::to_string(nodes) +
                            " nodes (estimated error " + std::to_string(err) + ")");
    coarse = fine;
  }
}

double fisher_at_offset(const ChannelParams& params, double phi) {
  return fisher_symbol(params, params.theta - phi).per_symbol;
}

McEstimate fisher_symbol_mc(const ChannelParams& params, double psi, std::size_t trials,
                            std::uint64_t seed) {
  if (trials < 2) throw ConfigError("fisher_symbol_mc: need at least two trials");
  const ObservationBlock block = sample_block(params, psi, trials, seed);
  const Mixture mix(params, psi);

  // Welford accumulation of the score and of its square.
  double mean = 0.0, m2 = 0.0;
  double sq_mean = 0.0, sq_m2 = 0.0;
  std::size_t k = 0;
  for (double x : block.x) {
    double log_peak = 0.0, weight_sum = 0.0;
    const double s = mix.score(x, log_peak, weight_sum);
    ++k;
    const double kd = static_cast<double>(k);
    const double delta = s - mean;
    mean += delta / kd;
    m2 += delta * (s - mean);
    const double sq = s * s;
    const double sq_delta = sq - sq_mean;
    sq_mean += sq_delta / kd;
    sq_m2 += sq_delta * (sq - sq_mean);
  }
  const double nd = static_cast<double>(trials);
  McEstimate est;
  est.value = m2 / (nd - 1.0);
  est.stderr_ = std::sqrt(sq_m2 / (nd - 1.0) / nd);
  return est;
}

double fisher_high_snr(const ChannelParams& params, double psi) {
  const double s = std::sin(params.theta - psi);
  return params.amplitude() * params.amplitude() / params.noise_var() * s * s;
}

FcMax fc_max(const ChannelParams& params, std::size_t n) {
  if (n == 0) throw ConfigError("fc_max: block length must be >= 1");
  params.validate();

  constexpr int kGrid = 64;
  const double step = (kPi / 2.0) / (kGrid - 1);
  int best = 0;
  double best_value = -1.0;
  for (int i = 0; i < kGrid; ++i) {
    const double f = fisher_at_offset(params, i * step);
    if (f > best_value) {
      best_value = f;
      best = i;
    }
  }
  const double lo = std::max(0.0, (best - 1) * step);
  const double hi = std::min(kPi / 2.0, (best + 1) * step);
  const double phi = golden_section_max([&](double p) { return fisher_at_offset(params, p); }, lo,
                                        hi, 1e-6);
  FcMax out;
  out.phi_argmax = phi;
  out.per_symbol = fisher_at_offset(params, phi);
  if (out.per_symbol < best_value) {
    out.per_symbol = best_value;
    out.phi_argmax = best * step;
  }
  out.value = static_cast<double>(n) * out.per_symbol;
  return out;
}

OptimalAngles optimal_angles(double theta_hat) {
  return {mod_pi(theta_hat), mod_pi(theta_hat + kPi / 2.0)};
}

ParetoPoint pareto_known_theta(const ChannelParams& params, std::size_t n, double gamma_min) {
  return pareto_known_theta(params, n, gamma_min, fc_max(params, n));
}

ParetoPoint pareto_known_theta(const ChannelParams& params, std::size_t n, double gamma_min,
                               const FcMax& peak) {
  if (!std::isfinite(gamma_min) || gamma_min < 0.0)
    throw ConfigError("pareto_known_theta: gamma_min must be finite and >= 0");
  if (gamma_min > peak.value * (1.0 + 1e-12))
    throw InfeasibleError("pareto_known_theta: gamma_min " + std::to_string(gamma_min) +
                          " exceeds F_c^max " + std::to_string(peak.value));

  const auto nd = static_cast<double>(n);
  auto block_fisher = [&](double phi) { return nd * fisher_at_offset(params, phi); };

  ParetoPoint out;
  out.gamma_min = gamma_min;
  if (gamma_min <= 0.0) {
    out.phi_star = 0.0;
  } else if (gamma_min >= peak.value) {
    out.phi_star = peak.phi_argmax;
  } else {
    // Bracket [lo, hi] with block_fisher(lo) < gamma_min <= block_fisher(hi). If the
    // scan finds F monotone on [0, argmax] the bracket is the whole segment;
    // otherwise it is the first grid cell that crosses the threshold.
    constexpr int kGrid = 64;
    const double step = peak.phi_argmax / (kGrid - 1);
    double lo = 0.0, hi = peak.phi_argmax;
    double prev = block_fisher(0.0);
    bool monotone = true;
    int first_feasible = -1;
    for (int i = 1; i < kGrid; ++i) {
      const double f = block_fisher(i * step);
      if (f < prev * (1.0 - 1e-12)) monotone = false;
      if (first_feasible < 0 && f >= gamma_min) first_feasible = i;
      prev = f;
    }
    if (!monotone && first_feasible > 0) {
      lo = (first_feasible - 1) * step;
      hi = first_feasible * step;
    }
    while (hi - lo > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      if (block_fisher(mid) >= gamma_min)
        hi = mid;
      else
        lo = mid;
    }
    out.phi_star = hi;
  }
  out.ber = q_function(params.snr_amplitude() * std::cos(out.phi_star));
  return out;
}

}  // namespace qisac

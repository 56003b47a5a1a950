#include "qisac/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include "qisac/angles.hpp"
#include "qisac/errors.hpp"
#include "qisac/rng.hpp"

namespace qisac {
namespace {

constexpr double kMinCurvature = 1e-12;
constexpr int kMaxHalvings = 30;

std::array<double, 2> offsets(double psi) {
  return {carrier_phase(Symbol::Zero) - psi, carrier_phase(Symbol::One) - psi};
}

double golden_section_min(auto&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
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

std::vector<double> initial_thetas(const InitPolicy& init) {
  return std::visit(
      [](const auto& policy) -> std::vector<double> {
        using T = std::decay_t<decltype(policy)>;
        if constexpr (std::is_same_v<T, MultiStartInit>) {
          std::vector<double> out;
          for (int k = 0; k < policy.starts; ++k) out.push_back(kPi * k / policy.starts);
          return out;
        } else if constexpr (std::is_same_v<T, RandomInit>) {
          Rng rng = make_rng(policy.seed);
          std::uniform_real_distribution<double> u(0.0, kPi);
          return {u(rng)};
        } else {
          return {policy.theta};
        }
      },
      init);
}

// E-step at theta that also returns the observed-data log-likelihood, sharing
// one exponential per sample.
double e_step_into(std::span<const double> x, const ChannelParams& params, double psi,
                   double theta, Responsibilities& resp) {
  ChannelParams p = params;
  p.theta = theta;
  const double mu0 = symbol_mean(p, psi, Symbol::Zero);
  const double mu1 = symbol_mean(p, psi, Symbol::One);
  const double var = p.noise_var();
  const double inv_two_var = 1.0 / (2.0 * var);
  const double log_half_norm = std::log(0.5) - 0.5 * std::log(2.0 * kPi * var);

  resp.resize(x.size());
  double loglik = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double q0 = (x[n] - mu0) * (x[n] - mu0) * inv_two_var;
    const double q1 = (x[n] - mu1) * (x[n] - mu1) * inv_two_var;
    // r = log N(x; μ0) − log N(x; μ1); e = exp(−|r|) ∈ (0, 1]
    const double r = q1 - q0;
    const double e = std::exp(-std::abs(r));
    const double major = 1.0 / (1.0 + e);
    const double minor = e * major;
    resp[n] = r >= 0.0 ? std::array<double, 2>{major, minor} : std::array<double, 2>{minor, major};
    loglik += log_half_norm - std::min(q0, q1) + std::log1p(e);
  }
  return loglik;
}

struct SingleRun {
  double theta = 0.0;
  std::vector<double> loglik;
  Responsibilities resp;  // at theta
  int iterations = 0;
  bool converged = false;
};

SingleRun run_single(std::span<const double> x, const ChannelParams& params, double psi,
                     double theta0, const EmConfig& config) {
  SingleRun run;
  run.theta = theta0;
  run.loglik.push_back(e_step_into(x, params, psi, theta0, run.resp));
  const double amplitude = params.amplitude();
  for (int l = 0; l < config.l_max; ++l) {
    const MStepProblem problem(x, run.resp, amplitude, psi);
    const double next = newton_update(problem, run.theta, config).theta;
    const double delta = angle_diff_2pi(next, run.theta);
    run.theta = next;
    run.loglik.push_back(e_step_into(x, params, psi, next, run.resp));
    run.iterations = l + 1;
    if (std::abs(delta) < config.eps) {
      run.converged = true;
      break;
    }
  }
  return run;
}

}  // namespace

void EmConfig::validate() const {
  if (!(eps > 0.0)) throw ConfigError("EM eps must be > 0");
  if (l_max < 1) throw ConfigError("EM l_max must be >= 1");
  if (newton_max < 1) throw ConfigError("EM newton_max must be >= 1");
  if (!(newton_tol > 0.0)) throw ConfigError("EM newton_tol must be > 0");
  if (const auto* ms = std::get_if<MultiStartInit>(&init); ms && ms->starts < 1)
    throw ConfigError("multi-start init needs at least one start");
}

Responsibilities e_step(std::span<const double> x, const ChannelParams& params, double psi,
                        double theta_t) {
  Responsibilities resp;
  e_step_into(x, params, psi, theta_t, resp);
  return resp;
}

double m_step_objective(std::span<const double> x, const ChannelParams& params, double psi,
                        double theta, const Responsibilities& resp) {
  const double a = params.amplitude();
  const auto c = offsets(psi);
  double total = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    for (int m = 0; m < 2; ++m) {
      const double r = x[n] - a * std::cos(theta + c[m]);
      total += resp[n][m] * r * r;
    }
  }
  return total;
}

double m_step_gradient(std::span<const double> x, const ChannelParams& params, double psi,
                       double theta, const Responsibilities& resp) {
  const double a = params.amplitude();
  const auto c = offsets(psi);
  double total = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    for (int m = 0; m < 2; ++m) {
      const double u = theta + c[m];
      total += resp[n][m] * (x[n] * std::sin(u) - 0.5 * a * std::sin(2.0 * u));
    }
  }
  return 2.0 * a * total;
}

double m_step_hessian(std::span<const double> x, const ChannelParams& params, double psi,
                      double theta, const Responsibilities& resp) {
  const double a = params.amplitude();
  const auto c = offsets(psi);
  double total = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    for (int m = 0; m < 2; ++m) {
      const double u = theta + c[m];
      total += resp[n][m] * (x[n] * std::cos(u) - a * std::cos(2.0 * u));
    }
  }
  return 2.0 * a * total;
}

MStepProblem::MStepProblem(std::span<const double> x, const Responsibilities& resp,
                           double amplitude, double psi)
    : amplitude_(amplitude), offset_(offsets(psi)) {
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double xn = x[n];
    for (int m = 0; m < 2; ++m) {
      weight_[m] += resp[n][m];
      first_[m] += resp[n][m] * xn;
      second_ += resp[n][m] * xn * xn;
    }
  }
}

double MStepProblem::objective(double theta) const {
  double total = second_;
  for (int m = 0; m < 2; ++m) {
    const double mu = amplitude_ * std::cos(theta + offset_[m]);
    total += -2.0 * first_[m] * mu + weight_[m] * mu * mu;
  }
  return total;
}

double MStepProblem::gradient(double theta) const {
  double total = 0.0;
  for (int m = 0; m < 2; ++m) {
    const double u = theta + offset_[m];
    total += first_[m] * std::sin(u) - 0.5 * amplitude_ * weight_[m] * std::sin(2.0 * u);
  }
  return 2.0 * amplitude_ * total;
}

double MStepProblem::hessian(double theta) const {
  double total = 0.0;
  for (int m = 0; m < 2; ++m) {
    const double u = theta + offset_[m];
    total += first_[m] * std::cos(u) - amplitude_ * weight_[m] * std::cos(2.0 * u);
  }
  return 2.0 * amplitude_ * total;
}

NewtonResult newton_update(const MStepProblem& problem, double theta_t, const EmConfig& config) {
  NewtonResult out;
  double theta = theta_t;
  double j = problem.objective(theta);
  if (!std::isfinite(j)) throw ConvergenceError("newton_update: objective is not finite");

  for (int it = 0; it < config.newton_max; ++it) {
    out.iterations = it + 1;
    const double g = problem.gradient(theta);
    const double h = problem.hessian(theta);

    if (h > kMinCurvature && std::isfinite(g)) {
      // J is 2π-periodic; a step longer than a quarter turn leaves the basin.
      const double step = std::clamp(-g / h, -kPi / 2.0, kPi / 2.0);
      double scale = 1.0;
      bool accepted = false;
      for (int k = 0; k <= kMaxHalvings && !accepted; ++k) {
        const double candidate = theta + scale * step;
        const double jc = problem.objective(candidate);
        if (jc <= j) {
          theta = candidate;
          j = jc;
          accepted = true;
        } else {
          scale *= 0.5;
        }
      }
      if (accepted) {
        if (std::abs(scale * step) < config.newton_tol) break;
        continue;
      }
    }

    out.used_fallback = true;
    const double candidate = golden_section_min([&](double t) { return problem.objective(t); },
                                                theta - kPi / 2.0, theta + kPi / 2.0, 1e-12);
    const double jc = problem.objective(candidate);
    if (!(jc <= j))
      throw ConvergenceError("newton_update: safeguard fallback failed to decrease J");
    const double moved = std::abs(candidate - theta);
    theta = candidate;
    j = jc;
    if (moved < config.newton_tol) break;
  }
  out.theta = theta;
  return out;
}

NewtonResult newton_update(std::span<const double> x, const ChannelParams& params, double psi,
                           double theta_t, const Responsibilities& resp, const EmConfig& config) {
  return newton_update(MStepProblem(x, resp, params.amplitude(), psi), theta_t, config);
}

std::vector<Symbol> hard_decisions(const Responsibilities& resp) {
  std::vector<Symbol> out;
  out.reserve(resp.size());
  for (const auto& row : resp) out.push_back(row[1] > row[0] ? Symbol::One : Symbol::Zero);
  return out;
}

EmResult run_em(const ObservationBlock& block, const ChannelParams& params, double psi,
                const EmConfig& config) {
  return run_em(std::span<const double>(block.x), params, psi, config);
}

EmResult run_em(std::span<const double> x, const ChannelParams& params, double psi,
                const EmConfig& config) {
  if (x.empty()) throw ConfigError("run_em: observation block is empty");
  config.validate();

  std::optional<SingleRun> best;
  int failed = 0;
  std::string last_error;
  for (double theta0 : initial_thetas(config.init)) {
    try {
      SingleRun run = run_single(x, params, psi, theta0, config);
      if (!best || run.loglik.back() > best->loglik.back()) best = std::move(run);
    } catch (const ConvergenceError& e) {
      ++failed;
      last_error = e.what();
    }
  }
  if (!best) throw ConvergenceError("run_em: all starts failed: " + last_error);

  EmResult result;
  result.theta_raw = best->theta;
  result.theta_hat = mod_pi(best->theta);
  result.responsibilities = std::move(best->resp);
  result.s_hat = hard_decisions(result.responsibilities);
  result.loglik_trace = std::move(best->loglik);
  result.iterations = best->iterations;
  result.converged = best->converged;
  result.failed_starts = failed;
  const double separation =
      2.0 * params.amplitude() * std::abs(std::cos(best->theta - psi));
  result.flat_likelihood = separation < params.noise_std();
  return result;
}

}  // namespace qisac

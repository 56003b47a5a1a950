#pragma once

// Joint phase estimation and symbol detection for a fixed LO phase ψ.
//
// EM over the latent BPSK symbols: the E-step computes posteriors γₙₘ, the
// M-step minimizes the weighted quadratic cost J(θ) = Σₙ Σₘ γₙₘ (xₙ − A cos(θ + cₘ))²,
// cₘ = π·m − ψ, with a safeguarded Newton iteration. θ is identifiable only
// modulo π (θ → θ + π swaps the symbol labels).

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "qisac/physics.hpp"

namespace qisac {

using Responsibilities = std::vector<std::array<double, 2>>;

struct MultiStartInit {
  int starts = 8;  // equally spaced in [0, π)
};
struct RandomInit {
  std::uint64_t seed = 0;  // one uniform draw in [0, π)
};
struct FixedInit {
  double theta = 0.0;
};
using InitPolicy = std::variant<MultiStartInit, RandomInit, FixedInit>;

struct EmConfig {
  double eps = 1e-3;         // stop when |Δθ| < eps
  int l_max = 500;           // EM iterations
  int newton_max = 100;      // Newton iterations per M-step
  double newton_tol = 1e-3;  // Newton step tolerance [rad]
  InitPolicy init = MultiStartInit{};

  void validate() const;
};

struct EmResult {
  double theta_hat = 0.0;  // canonical, in [0, π)
  double theta_raw = 0.0;  // final iterate; s_hat is labeled relative to this
  Responsibilities responsibilities;
  std::vector<Symbol> s_hat;
  std::vector<double> loglik_trace;  // at θ⁽⁰⁾, θ⁽¹⁾, ...
  int iterations = 0;
  bool converged = false;
  // Fitted symbol means closer than one noise standard deviation: the
  // likelihood carries almost no phase information.
  bool flat_likelihood = false;
  int failed_starts = 0;
};

/// Posterior γₙₘ = N(xₙ; μₘ) / Σₖ N(xₙ; μₖ) at θ = theta_t, in logistic form.
Responsibilities e_step(std::span<const double> x, const ChannelParams& params, double psi,
                        double theta_t);

/// J(θ), evaluated term by term.
double m_step_objective(std::span<const double> x, const ChannelParams& params, double psi,
                        double theta, const Responsibilities& resp);
/// g(θ) = ∂J/∂θ = 2A ΣΣ γ [xₙ sin(θ+cₘ) − (A/2) sin(2(θ+cₘ))], term by term.
double m_step_gradient(std::span<const double> x, const ChannelParams& params, double psi,
                       double theta, const Responsibilities& resp);
/// h(θ) = ∂²J/∂θ² = 2A ΣΣ γ [xₙ cos(θ+cₘ) − A cos(2(θ+cₘ))], term by term.
double m_step_hessian(std::span<const double> x, const ChannelParams& params, double psi,
                      double theta, const Responsibilities& resp);

/// J, g and h from per-symbol weighted moments Σγ, Σγx, Σγx². Identical to the
/// term-by-term forms by linearity, but O(1) per evaluation.
class MStepProblem {
 public:
  MStepProblem(std::span<const double> x, const Responsibilities& resp, double amplitude,
               double psi);

  double objective(double theta) const;
  double gradient(double theta) const;
  double hessian(double theta) const;

 private:
  double amplitude_;
  std::array<double, 2> offset_{};   // cₘ
  std::array<double, 2> weight_{};   // Σₙ γₙₘ
  std::array<double, 2> first_{};    // Σₙ γₙₘ xₙ
  double second_ = 0.0;              // Σₙ Σₘ γₙₘ xₙ²
};

struct NewtonResult {
  double theta = 0.0;
  int iterations = 0;
  bool used_fallback = false;
};

/// Minimizes J from theta_t. A Newton step is taken only when h > 1e-12 and it
/// does not increase J; otherwise the step is halved up to 30 times and then
/// replaced by golden-section search on [θ − π/2, θ + π/2]. Throws
/// ConvergenceError if that search cannot reduce J either.
NewtonResult newton_update(const MStepProblem& problem, double theta_t, const EmConfig& config);
NewtonResult newton_update(std::span<const double> x, const ChannelParams& params, double psi,
                           double theta_t, const Responsibilities& resp, const EmConfig& config);

/// Full EM from every start of config.init; keeps the start with the highest
/// final observed-data log-likelihood. Throws ConvergenceError only if every
/// start fails.
EmResult run_em(const ObservationBlock& block, const ChannelParams& params, double psi,
                const EmConfig& config);
EmResult run_em(std::span<const double> x, const ChannelParams& params, double psi,
                const EmConfig& config);

/// argmaxₘ γₙₘ, ties to symbol 0.
std::vector<Symbol> hard_decisions(const Responsibilities& resp);

}  // namespace qisac

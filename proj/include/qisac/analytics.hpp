#pragma once

// Closed-form and numerical performance measures of the homodyne BPSK link:
// error probability, classical Fisher information of the outcome mixture about
// θ, the optimal LO angles and the known-θ BER/Fisher trade-off.

#include <cstddef>
#include <cstdint>

#include "qisac/physics.hpp"

namespace qisac {

/// Gaussian tail probability Q(x) = ½ erfc(x/√2).
double q_function(double x);

/// Pₑ = Q((A/σ)|cos(θ − ψ)|).
double ber_theory(const ChannelParams& params, double psi);

struct QuadratureOptions {
  std::size_t nodes = 2048;     // base node count K; the estimate compares K and 2K
  std::size_t max_nodes = 1u << 17;
  double rel_tol = 1e-8;
  double span_sigmas = 12.0;    // integrate over [μmin − span·σ, μmax + span·σ]
};

struct FisherReport {
  double per_symbol = 0.0;  // F(ψ, θ)
  double block = 0.0;       // F_c = n·F
  std::size_t n = 1;
  std::size_t quad_nodes = 0;
  double quad_error_est = 0.0;
};

/// Fisher information of the two-component outcome mixture about θ,
/// F = ½ ∫ [Σₘ N(x;μₘ,σ²)(x−μₘ)μ'ₘ/σ²]² / Σₘ N(x;μₘ,σ²) dx,
/// by composite Gauss–Legendre quadrature. Nodes are doubled until two
/// successive results agree to rel_tol; throws QuadratureError past max_nodes.
FisherReport fisher_symbol(const ChannelParams& params, double psi, std::size_t n = 1,
                           const QuadratureOptions& opts = {});

struct McEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Sample variance of the score ∂θ log p(x; ψ, θ) over `trials` draws.
McEstimate fisher_symbol_mc(const ChannelParams& params, double psi, std::size_t trials,
                            std::uint64_t seed);

/// Well-separated-lobes limit (A²/σ²) sin²(θ − ψ).
double fisher_high_snr(const ChannelParams& params, double psi);

struct FcMax {
  double value = 0.0;       // n · max_φ F
  double phi_argmax = 0.0;  // in [0, π/2]
  double per_symbol = 0.0;
};

/// Maximum block Fisher over the offset φ ∈ [0, π/2]: 64-point scan then
/// golden-section refinement to 1e-6 rad.
FcMax fc_max(const ChannelParams& params, std::size_t n);

struct OptimalAngles {
  double psi_com = 0.0;  // θ̂ mod π
  double psi_sen = 0.0;  // (θ̂ + π/2) mod π
};

OptimalAngles optimal_angles(double theta_hat);

struct ParetoPoint {
  double gamma_min = 0.0;
  double phi_star = 0.0;
  double ber = 0.0;
};

/// Smallest offset φ ∈ [0, φ_argmax] with n·F(φ) ≥ gamma_min, and its BER.
/// Throws InfeasibleError when gamma_min exceeds fc_max.
ParetoPoint pareto_known_theta(const ChannelParams& params, std::size_t n, double gamma_min);
/// Same, reusing a precomputed fc_max.
ParetoPoint pareto_known_theta(const ChannelParams& params, std::size_t n, double gamma_min,
                               const FcMax& peak);

/// F at effective offset phi (ψ = θ − φ); convenience for scans.
double fisher_at_offset(const ChannelParams& params, double phi);

}  // namespace qisac

#pragma once

// Homodyne measurement statistics of a BPSK coherent-state link.
//
// A symbol m ∈ {0,1} is sent with carrier phase π·m. After a phase-insensitive
// Gaussian channel and homodyne detection at LO phase ψ, the outcome is
// x ~ Normal(A·cos(π·m + θ − ψ), Na + 1/2) with A = sqrt(2·η·E).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qisac {

struct ChannelParams {
  double E = 10.0;     // mean photon number per symbol
  double eta = 0.8;    // transmissivity, (0, 1]
  double Na = 3.0;     // thermal photon number
  double theta = 0.0;  // true channel phase rotation [rad]

  /// Throws ConfigError unless E > 0, 0 < eta <= 1, Na >= 0 and all are finite.
  void validate() const;

  double amplitude() const;  // A = sqrt(2 η E)
  double noise_var() const;  // σ² = Na + 1/2
  double noise_std() const;
  double snr_amplitude() const;  // A / σ
};

enum class Symbol : std::uint8_t { Zero = 0, One = 1 };

constexpr int index(Symbol m) noexcept { return static_cast<int>(m); }
constexpr Symbol flip(Symbol m) noexcept { return m == Symbol::Zero ? Symbol::One : Symbol::Zero; }
double carrier_phase(Symbol m) noexcept;  // π·m

/// μₘ = A cos(φₘ + θ − ψ).
double symbol_mean(const ChannelParams& params, double psi, Symbol m);
/// ∂μₘ/∂θ = −A sin(φₘ + θ − ψ).
double symbol_mean_deriv(const ChannelParams& params, double psi, Symbol m);

/// Gaussian log-density log N(x; mu, var).
double log_normal_pdf(double x, double mu, double var) noexcept;

struct ObservationBlock {
  std::vector<double> x;
  std::vector<Symbol> s_true;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return x.size(); }
};

/// Draws n equiprobable symbols and their homodyne outcomes at LO phase psi.
/// Deterministic in (params, psi, n, seed). Throws ConfigError for n == 0.
ObservationBlock sample_block(const ChannelParams& params, double psi, std::size_t n,
                              std::uint64_t seed);

/// Observed-data log-likelihood Σ log[½ Σₘ N(xₙ; μₘ, σ²)] with θ replaced by theta.
double observed_loglik(std::span<const double> x, const ChannelParams& params, double psi,
                       double theta);

}  // namespace qisac

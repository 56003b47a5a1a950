#include "qisac/physics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "qisac/angles.hpp"
#include "qisac/errors.hpp"
#include "qisac/rng.hpp"

namespace qisac {

void ChannelParams::validate() const {
  if (!std::isfinite(E) || !(E > 0.0)) throw ConfigError("E must be a finite value > 0");
  if (!std::isfinite(eta) || !(eta > 0.0) || eta > 1.0)
    throw ConfigError("eta must lie in (0, 1], got " + std::to_string(eta));
  if (!std::isfinite(Na) || Na < 0.0) throw ConfigError("Na must be a finite value >= 0");
  if (!std::isfinite(theta)) throw ConfigError("theta must be finite");
}

double ChannelParams::amplitude() const { return std::sqrt(2.0 * eta * E); }
double ChannelParams::noise_var() const { return Na + 0.5; }
double ChannelParams::noise_std() const { return std::sqrt(noise_var()); }
double ChannelParams::snr_amplitude() const { return amplitude() / noise_std(); }

double carrier_phase(Symbol m) noexcept { return m == Symbol::Zero ? 0.0 : kPi; }

// cos(π·m + φ) = ±cos φ; the sign form keeps the two means exactly antipodal.
double symbol_mean(const ChannelParams& params, double psi, Symbol m) {
  const double sign = m == Symbol::Zero ? 1.0 : -1.0;
  return sign * params.amplitude() * std::cos(params.theta - psi);
}

double symbol_mean_deriv(const ChannelParams& params, double psi, Symbol m) {
  const double sign = m == Symbol::Zero ? 1.0 : -1.0;
  return -sign * params.amplitude() * std::sin(params.theta - psi);
}

double log_normal_pdf(double x, double mu, double var) noexcept {
  const double d = x - mu;
  return -0.5 * (d * d / var + std::log(2.0 * kPi * var));
}

ObservationBlock sample_block(const ChannelParams& params, double psi, std::size_t n,
                              std::uint64_t seed) {
  if (n == 0) throw ConfigError("sample_block: block length must be >= 1");
  params.validate();

  const double mu0 = symbol_mean(params, psi, Symbol::Zero);
  const double mu1 = symbol_mean(params, psi, Symbol::One);
  const double sigma = params.noise_std();

  Rng rng = make_rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> noise(0.0, sigma);

  ObservationBlock block;
  block.seed = seed;
  block.x.reserve(n);
  block.s_true.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Symbol m = coin(rng) ? Symbol::One : Symbol::Zero;
    block.s_true.push_back(m);
    block.x.push_back((m == Symbol::Zero ? mu0 : mu1) + noise(rng));
  }
  return block;
}

double observed_loglik(std::span<const double> x, const ChannelParams& params, double psi,
                       double theta) {
  ChannelParams p = params;
  p.theta = theta;
  const double mu0 = symbol_mean(p, psi, Symbol::Zero);
  const double mu1 = symbol_mean(p, psi, Symbol::One);
  const double var = p.noise_var();
  double total = 0.0;
  for (double xn : x) {
    const double l0 = log_normal_pdf(xn, mu0, var);
    const double l1 = log_normal_pdf(xn, mu1, var);
    const double hi = std::max(l0, l1);
    total += hi + std::log(0.5 * (std::exp(l0 - hi) + std::exp(l1 - hi)));
  }
  return total;
}

}  // namespace qisac

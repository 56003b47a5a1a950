#pragma once

// Outer loop: after each EM pass the LO phase is nudged toward the
// communication-optimal angle (θ̂) when the block Fisher constraint holds and
// toward the sensing-optimal angle (θ̂ + π/2) otherwise.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qisac/em.hpp"
#include "qisac/physics.hpp"

namespace qisac {

enum class TargetKind { Communication, Sensing };

std::string to_string(TargetKind kind);

enum class BlockRefresh {
  Redraw,  // a new block measured at the current ψ every outer iteration
  Reuse,   // one block drawn at ψ⁽⁰⁾ and reinterpreted at every ψ
};

struct AlgoConfig {
  double gamma_min = 0.0;          // absolute, or a fraction of F_c^max if gamma_is_fraction
  bool gamma_is_fraction = false;
  double lambda = 0.01;
  double eps = 1e-3;               // stop when |Δψ| < eps
  int t_max = 500;
  EmConfig em;
  double psi0 = 1.5707963267948966;  // π/2
  BlockRefresh refresh = BlockRefresh::Redraw;
  bool warm_start = true;          // later EM passes start from the previous θ̂

  void validate() const;
};

/// x − π·round(x/π), rounding halves away from zero. Result in [−π/2, π/2].
double wrap_pi(double x);

struct Target {
  TargetKind kind = TargetKind::Communication;
  double psi = 0.0;  // in [0, π)
};

/// Communication target θ̂ mod π when fc ≥ gamma_min, else (θ̂ + π/2) mod π.
Target select_target(double fc, double gamma_min, double theta_hat);

/// (ψ + λ·wrap_pi(ψ_tar − ψ)) mod π.
double update_psi(double psi, double psi_tar, double lambda);

struct IterationRecord {
  int iter = 0;
  double theta_hat = 0.0;   // canonical EM estimate
  double psi = 0.0;         // LO phase the block was measured at
  double psi_next = 0.0;
  double delta_psi = 0.0;   // wrap_pi(ψ_tar − ψ)
  double fc = 0.0;          // n·F(ψ, θ̂); NaN on quadrature failure
  bool fc_ok = true;
  double ber_emp = 0.0;
  bool flipped = false;
  double ber_theory = 0.0;  // Q((A/σ)|cos(θ − ψ)|) at the true θ
  TargetKind target = TargetKind::Communication;
  int em_iterations = 0;
  bool em_converged = false;
};

struct RunTrace {
  ChannelParams params;
  double gamma_min = 0.0;  // resolved absolute threshold
  double fc_max = 0.0;
  std::size_t n_block = 0;
  std::vector<IterationRecord> records;
  double theta_hat = 0.0;
  double psi_hat = 0.0;
  std::vector<Symbol> s_hat;
};

/// Supplies the observation block for outer iteration `iter` at LO phase psi.
using BlockSource = std::function<ObservationBlock(double psi, int iter)>;

/// Phase estimator used by the inner loop; run_em by default.
using PhaseEstimator = std::function<EmResult(const ObservationBlock&, const ChannelParams&,
                                              double psi, const EmConfig&)>;

/// New block at each iteration, seeded from stream_seed(seed, iter).
BlockSource fresh_blocks(const ChannelParams& params, std::size_t n, std::uint64_t seed);
/// One block drawn at psi0 and returned every time.
BlockSource reused_block(const ChannelParams& params, double psi0, std::size_t n,
                         std::uint64_t seed);

/// Algorithm 1 outer loop. `fc_max` resolves a fractional gamma_min; pass a
/// negative value to have it computed here.
RunTrace run_qisac(const BlockSource& source, const ChannelParams& params,
                   const AlgoConfig& config, double fc_max = -1.0,
                   const PhaseEstimator& estimator = {});

}  // namespace qisac

#include "qisac/controller.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "qisac/analytics.hpp"
#include "qisac/angles.hpp"
#include "qisac/errors.hpp"
#include "qisac/rng.hpp"
#include "qisac/scoring.hpp"

namespace qisac {

std::string to_string(TargetKind kind) {
  return kind == TargetKind::Communication ? "com" : "sen";
}

void AlgoConfig::validate() const {
  if (!std::isfinite(gamma_min) || gamma_min < 0.0) throw ConfigError("gamma_min must be >= 0");
  if (gamma_is_fraction && gamma_min > 1.0)
    throw ConfigError("relative gamma_min must lie in [0, 1]");
  if (!(lambda > 0.0) || lambda > 1.0) throw ConfigError("lambda must lie in (0, 1]");
  if (!(eps > 0.0)) throw ConfigError("outer eps must be > 0");
  if (t_max < 1) throw ConfigError("t_max must be >= 1");
  if (!std::isfinite(psi0)) throw ConfigError("psi0 must be finite");
  em.validate();
}

double wrap_pi(double x) { return x - kPi * std::round(x / kPi); }

Target select_target(double fc, double gamma_min, double theta_hat) {
  const OptimalAngles angles = optimal_angles(theta_hat);
  if (fc >= gamma_min) return {TargetKind::Communication, angles.psi_com};
  return {TargetKind::Sensing, angles.psi_sen};
}

double update_psi(double psi, double psi_tar, double lambda) {
  return mod_pi(psi + lambda * wrap_pi(psi_tar - psi));
}

BlockSource fresh_blocks(const ChannelParams& params, std::size_t n, std::uint64_t seed) {
  return [params, n, seed](double psi, int iter) {
    return sample_block(params, psi, n, stream_seed(seed, static_cast<std::uint64_t>(iter)));
  };
}

BlockSource reused_block(const ChannelParams& params, double psi0, std::size_t n,
                         std::uint64_t seed) {
  auto block = std::make_shared<const ObservationBlock>(sample_block(params, psi0, n, seed));
  return [block](double, int) { return *block; };
}

RunTrace run_qisac(const BlockSource& source, const ChannelParams& params,
                   const AlgoConfig& config, double fc_max_value,
                   const PhaseEstimator& estimator) {
  params.validate();
  config.validate();
  const PhaseEstimator estimate =
      estimator ? estimator
                : PhaseEstimator([](const ObservationBlock& b, const ChannelParams& p, double psi,
                                    const EmConfig& c) { return run_em(b, p, psi, c); });

  RunTrace trace;
  trace.params = params;
  double psi = mod_pi(config.psi0);
  EmConfig em_config = config.em;

  for (int t = 0; t < config.t_max; ++t) {
    const ObservationBlock block = source(psi, t);
    if (t == 0) {
      trace.n_block = block.size();
      if (config.gamma_is_fraction) {
        if (fc_max_value < 0.0) fc_max_value = fc_max(params, block.size()).value;
        trace.gamma_min = config.gamma_min * fc_max_value;
      } else {
        trace.gamma_min = config.gamma_min;
      }
      trace.fc_max = fc_max_value;
    }

    const EmResult em = estimate(block, params, psi, em_config);
    if (config.warm_start) em_config.init = FixedInit{em.theta_raw};

    IterationRecord rec;
    rec.iter = t;
    rec.theta_hat = em.theta_hat;
    rec.psi = psi;
    rec.em_iterations = em.iterations;
    rec.em_converged = em.converged;
    const BerScore score = score_ber(em.s_hat, block.s_true);
    rec.ber_emp = score.ber;
    rec.flipped = score.flipped;
    rec.ber_theory = ber_theory(params, psi);

    ChannelParams estimated = params;
    estimated.theta = em.theta_hat;
    try {
      rec.fc = fisher_symbol(estimated, psi, block.size()).block;
    } catch (const QuadratureError&) {
      rec.fc = std::numeric_limits<double>::quiet_NaN();
      rec.fc_ok = false;
    }

    trace.theta_hat = em.theta_hat;
    trace.s_hat = em.s_hat;

    if (!rec.fc_ok) {
      // Without a Fisher value there is no feasibility decision; hold ψ.
      rec.psi_next = psi;
      rec.delta_psi = 0.0;
      trace.records.push_back(rec);
      continue;
    }

    const Target target = select_target(rec.fc, trace.gamma_min, em.theta_hat);
    rec.target = target.kind;
    rec.delta_psi = wrap_pi(target.psi - psi);
    rec.psi_next = update_psi(psi, target.psi, config.lambda);
    trace.records.push_back(rec);
    psi = rec.psi_next;
    if (std::abs(rec.delta_psi) < config.eps) break;
  }
  trace.psi_hat = psi;
  return trace;
}

}  // namespace qisac

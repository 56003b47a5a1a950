#pragma once

#include <span>

#include "qisac/physics.hpp"

namespace qisac {

struct BerScore {
  double ber = 0.0;
  bool flipped = false;  // decisions were complemented before scoring
};

/// Mismatch fraction e, resolved for the BPSK label ambiguity: min(e, 1 − e).
/// Throws ConfigError on length mismatch or empty input.
BerScore score_ber(std::span<const Symbol> s_hat, std::span<const Symbol> s_true);

/// Raw mismatch fraction without ambiguity resolution.
double score_ber_strict(std::span<const Symbol> s_hat, std::span<const Symbol> s_true);

}  // namespace qisac

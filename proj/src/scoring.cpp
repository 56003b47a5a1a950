#include "qisac/scoring.hpp"

#include "qisac/errors.hpp"

namespace qisac {

double score_ber_strict(std::span<const Symbol> s_hat, std::span<const Symbol> s_true) {
  if (s_hat.size() != s_true.size())
    throw ConfigError("score_ber: decision and truth sequences differ in length");
  if (s_hat.empty()) throw ConfigError("score_ber: empty sequences");
  std::size_t errors = 0;
  for (std::size_t n = 0; n < s_hat.size(); ++n) errors += s_hat[n] != s_true[n];
  return static_cast<double>(errors) / static_cast<double>(s_hat.size());
}

BerScore score_ber(std::span<const Symbol> s_hat, std::span<const Symbol> s_true) {
  const double e = score_ber_strict(s_hat, s_true);
  if (1.0 - e < e) return {1.0 - e, true};
  return {e, false};
}

}  // namespace qisac

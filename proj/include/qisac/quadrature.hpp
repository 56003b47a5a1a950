#pragma once

#include <cstddef>
#include <vector>

namespace qisac {

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendreRule(std::size_t order);
  std::size_t order() const noexcept { return nodes.size(); }
};

/// Composite Gauss–Legendre integral of f over [a, b] with `panels` equal panels.
template <typename F>
double integrate_composite(F&& f, double a, double b, std::size_t panels,
                           const GaussLegendreRule& rule) {
  const double width = (b - a) / static_cast<double>(panels);
  const double half = 0.5 * width;
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * width;
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.order(); ++i) panel += rule.weights[i] * f(mid + half * rule.nodes[i]);
    total += half * panel;
  }
  return total;
}

}  // namespace qisac

#pragma once

#include <cmath>
#include <numbers>

namespace qisac {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) noexcept { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / kPi; }

/// cos and sin of an angle in degrees, exact at multiples of 90°.
inline double cos_deg(double deg) noexcept {
  const double r = std::fmod(std::abs(deg), 360.0);
  if (r == 90.0 || r == 270.0) return 0.0;
  if (r == 180.0) return -1.0;
  if (r == 0.0) return 1.0;
  return std::cos(deg_to_rad(r));
}
inline double sin_deg(double deg) noexcept { return cos_deg(90.0 - deg); }

/// Canonical representative of x modulo π in [0, π).
inline double mod_pi(double x) noexcept {
  double r = std::fmod(x, kPi);
  if (r < 0.0) r += kPi;
  // fmod can return π - ulp + π for tiny negatives; fold back.
  if (r >= kPi) r -= kPi;
  return r;
}

/// Signed distance x - y reduced to (-π, π].
inline double angle_diff_2pi(double x, double y) noexcept {
  double d = std::remainder(x - y, 2.0 * kPi);
  if (d <= -kPi) d += 2.0 * kPi;
  return d;
}

}  // namespace qisac

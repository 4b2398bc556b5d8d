#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace qns {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Angular frequency is used everywhere inside the library (rad per unit time).
// Hz only appears at the I/O boundary.
inline constexpr double hz_to_rad(double f_hz) { return kTwoPi * f_hz; }
inline constexpr double rad_to_hz(double omega) { return omega / kTwoPi; }

/// Open frequency interval (lo, hi) in rad/time.
struct Band {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
  bool contains(double omega) const { return omega > lo && omega < hi; }
};

/// `count` equally spaced points covering [lo, hi] inclusive.
std::vector<double> uniform_grid(double lo, double hi, std::size_t count);

/// sin(x)/x with the removable singularity handled explicitly.
inline double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

}  // namespace qns

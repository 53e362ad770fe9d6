#ifndef SIMPLEXDIR_ANGLE_HPP_
#define SIMPLEXDIR_ANGLE_HPP_

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace simplexdir {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wrap any real into [0, 2pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

// Direction in [0, 2pi); wraps at construction, all arithmetic on raw reals.
class Angle {
 public:
  Angle() = default;
  explicit Angle(double radians) : value_(wrap_angle(radians)) {}
  double value() const { return value_; }

 private:
  double value_ = 0.0;
};

// Branch-corrected inverse tangent mapping R^2 \ {0} onto [0, 2pi):
// the unique y with (z1, z2) = r (cos y, sin y), r > 0.
inline double arctan_star(double z1, double z2) {
  if (z1 == 0.0 && z2 == 0.0) throw std::domain_error("arctan_star: undefined at the origin");
  if (z1 >= 0.0 && z2 >= 0.0) return std::atan(z2 / z1);
  if (z1 >= 0.0) return wrap_angle(std::atan(z2 / z1) + kTwoPi);
  return wrap_angle(std::atan(z2 / z1) + std::numbers::pi);
}

// Shortest arc length between two angles, in [0, pi].
inline double circular_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return std::min(d, kTwoPi - d);
}

}  // namespace simplexdir

#endif

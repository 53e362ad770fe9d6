#ifndef SIMPLEXDIR_DATA_HPP_
#define SIMPLEXDIR_DATA_HPP_

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "simplexdir/angle.hpp"

namespace simplexdir {

// Location on the 2-simplex: three nonnegative coordinates summing to 1.
class SimplexPoint {
 public:
  SimplexPoint() : x_(Eigen::Vector3d(1.0 / 3, 1.0 / 3, 1.0 / 3)) {}
  explicit SimplexPoint(const Eigen::Vector3d& x, double tol = 1e-9) : x_(x) {
    for (int i = 0; i < 3; ++i) {
      if (!(x_[i] >= 0.0)) throw std::domain_error("SimplexPoint: negative coordinate");
    }
    const double s = x_.sum();
    if (std::abs(s - 1.0) > tol) throw std::domain_error("SimplexPoint: coordinates do not sum to 1");
    x_ /= s;
  }
  SimplexPoint(double a, double b, double c, double tol = 1e-9)
      : SimplexPoint(Eigen::Vector3d(a, b, c), tol) {}

  const Eigen::Vector3d& coords() const { return x_; }
  double operator[](int i) const { return x_[i]; }

 private:
  Eigen::Vector3d x_;
};

struct Dataset {
  std::vector<SimplexPoint> locations;
  Eigen::VectorXd directions;  // wrapped into [0, 2pi)
  Eigen::VectorXd weights;     // empty = all ones

  int n() const { return static_cast<int>(directions.size()); }
  double weight(int i) const { return weights.size() == 0 ? 1.0 : weights[i]; }
  void check() const {
    if (static_cast<int>(locations.size()) != n())
      throw std::domain_error("Dataset: locations/directions length mismatch");
    if (weights.size() != 0 && weights.size() != directions.size())
      throw std::domain_error("Dataset: weights length mismatch");
  }
};

}  // namespace simplexdir

#endif

#ifndef SIMPLEXDIR_DIREXT_HPP_
#define SIMPLEXDIR_DIREXT_HPP_

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "simplexdir/data.hpp"

namespace simplexdir {

struct RotationMatrix {
  Eigen::Matrix3d o;
  bool pole_convention = false;  // x = (0,0,1): phi_1 fixed to 0
};

// Orthogonal frame built from the spherical coordinates of sqrt(x);
// maps (0, 0, 1) to sqrt(x).
RotationMatrix rotation_matrix(const SimplexPoint& x);

struct DirectionObservation {
  SimplexPoint location;  // x_1
  double direction = 0.0; // phi'_2 in [0, 2pi)
  double magnitude = 0.0; // theta'_2 >= 0
};

// Direction and magnitude of the movement x1 -> x2 in the rotated spherical
// frame of sqrt(x1). Throws for x1 == x2 (degenerate movement) and for the
// antipodal case where the direction is undefined.
DirectionObservation extract_direction(const SimplexPoint& x1, const SimplexPoint& x2);

// Inverse construction: the composition reached from x1 by moving with the
// given direction and magnitude (valid while the rotated point stays
// nonnegative).
SimplexPoint apply_direction(const SimplexPoint& x1, double direction, double magnitude);

// Keeps the first observation per location (locations equal within tol in
// max-norm); returns the kept list and the removed count.
std::pair<std::vector<DirectionObservation>, int> dedup(
    const std::vector<DirectionObservation>& obs, double tol = 0.0);

// CSV with header x1,x2,x3,y
Dataset load_dataset(const std::string& path);
void write_dataset(const std::string& path, const Dataset& data);

// CSV with header x1a,x2a,x3a,x1b,x2b,x3b
std::vector<std::pair<SimplexPoint, SimplexPoint>> load_pairs(const std::string& path);
void write_directions(const std::string& path, const std::vector<DirectionObservation>& obs);

}  // namespace simplexdir

#endif

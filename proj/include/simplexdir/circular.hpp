#ifndef SIMPLEXDIR_CIRCULAR_HPP_
#define SIMPLEXDIR_CIRCULAR_HPP_

#include <Eigen/Dense>
#include <span>

#include "simplexdir/angle.hpp"
#include "simplexdir/rng.hpp"

namespace simplexdir {

struct VonMisesParams {
  Angle mean;
  double concentration = 0.0;  // rho >= 0; 0 is the uniform distribution
};

// Isotropic projected normal PN2(mu, sigma^2 I).
struct Pn2Params {
  Eigen::Vector2d mu = Eigen::Vector2d::Zero();
  double sigma = 1.0;

  double mu0() const { return mu.norm(); }
  Angle alpha_mu() const {
    return mu0() == 0.0 ? Angle(std::numbers::pi) : Angle(arctan_star(mu.x(), mu.y()));
  }
};

struct CircularSummary {
  Angle mean;
  double variance = 1.0;          // 1 - resultant_length
  double resultant_length = 0.0;
  bool degenerate = false;        // zero resultant: mean reported as pi
};

double vm_log_density(double y, const VonMisesParams& p);
double vm_sample(const VonMisesParams& p, Rng& rng);  // Best-Fisher rejection

double pn2_density(double y, const Pn2Params& p);
double pn2_circular_variance(const Pn2Params& p);

CircularSummary circular_summary(std::span<const double> angles);
CircularSummary circular_summary(const Eigen::VectorXd& angles);

// Jammalamadaka-Sarma circular correlation, empirical plug-in.
double circular_correlation(std::span<const double> a, std::span<const double> b);

}  // namespace simplexdir

#endif

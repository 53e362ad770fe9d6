#ifndef SIMPLEXDIR_GP_HPP_
#define SIMPLEXDIR_GP_HPP_

#include <Eigen/Dense>
#include <vector>

#include "simplexdir/data.hpp"
#include "simplexdir/rng.hpp"

namespace simplexdir {

// Squared exponential kernel hyperparameters plus optional GP means.
// jitter < 0 selects the default policy: 1e-8 * sigma^2, escalated x10 up to
// 1e-4 * sigma^2 before erroring. An explicit jitter is used as-is (no
// escalation for jitter == 0).
struct GpSpec {
  double omega = 0.1;
  double sigma = 1.0;
  double jitter = -1.0;
  Eigen::VectorXd mean1, mean2;  // empty = 0; size 1 = constant; else per-location

  double mean1_at(int i) const { return at(mean1, i); }
  double mean2_at(int i) const { return at(mean2, i); }

 private:
  static double at(const Eigen::VectorXd& m, int i) {
    if (m.size() == 0) return 0.0;
    if (m.size() == 1) return m[0];
    return m[i];
  }
};

struct CovMatrix {
  Eigen::MatrixXd k;     // SPD, jitter included
  Eigen::MatrixXd chol;  // lower-triangular L with L L^T = k
  double jitter_used = 0.0;

  int n() const { return static_cast<int>(k.rows()); }
  // Solve k x = b through the cached factor.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
};

double sqexp_kernel(const SimplexPoint& x, const SimplexPoint& x2, const GpSpec& spec);

CovMatrix build_cov(const std::vector<SimplexPoint>& locs, const GpSpec& spec);

struct GpConditional {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// MVN conditional of the latent values at test_locs given train values.
// Prior means come from the spec (constant or zero; per-location means are
// only meaningful for the training block and are rejected for test points).
GpConditional gp_conditional(const std::vector<SimplexPoint>& train_locs,
                             const std::vector<SimplexPoint>& test_locs,
                             const Eigen::VectorXd& train_vals, const GpSpec& spec);

struct ProjectedGpSample {
  Eigen::VectorXd angles;
  Eigen::VectorXd z1, z2;
};

ProjectedGpSample projected_gp_sample(const GpSpec& spec,
                                      const std::vector<SimplexPoint>& locs, Rng& rng);

}  // namespace simplexdir

#endif

#ifndef SIMPLEXDIR_THEORY_HPP_
#define SIMPLEXDIR_THEORY_HPP_

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "simplexdir/circular.hpp"

namespace simplexdir {

struct PriorMoments {
  Angle mean;
  double variance = 1.0;
  bool degenerate_mean = false;  // zero resultant: mean reported as pi
};

// Prior circular mean/variance of an observation under the homogeneous
// spatial model with a global concentration rho and GP mean of polar form
// (mu0, alpha_mu) and marginal scale sigma.
PriorMoments svm_prior_moments(double mu0, double alpha_mu, double sigma, double rho);

// Mixture-probability model with fixed component means/concentrations and
// membership probabilities.
PriorMoments svmp_prior_moments(std::span<const double> ms, std::span<const double> rhos,
                                std::span<const double> probs);

struct CorrelationValue {
  double value = 0.0;
  bool degenerate = false;
};

// Circular correlation of two observations given the K x K joint membership
// probability matrix P(zeta_l = k, zeta_l' = k').
CorrelationValue svmp_prior_correlation(std::span<const double> ms,
                                        std::span<const double> rhos,
                                        const Eigen::MatrixXd& joint);

// Two-component specialization with standard-normal mixing latents,
// both components equally favored.
PriorMoments svmp2_prior_moments(double m1, double m2, double rho1, double rho2);

double inverse_logit(double z);
double logistic_expectation();  // E[psi^{-1}(Z)] for Z ~ N(0, 1)

struct LogisticBoundInputs {
  double s = 0.0;      // Cov(Z_l, Z_l') with unit marginals, |s| < 1
  double z_eps = 2.0;  // in (0, 2]
  double vartheta() const { return (1.0 - s * s) * z_eps / s; }
};

struct LogisticProductBounds {
  double lower = 0.0;
  double upper = 0.0;
  double f_product_expectation = 0.0;  // equals upper
};

// Bracketing of E[psi^{-1}(Z_l) psi^{-1}(Z_l')] through the piecewise-linear
// surrogate f.
LogisticProductBounds logistic_product_bounds(const LogisticBoundInputs& in);

struct TruncatedBivariateTerms {
  double e_one = 0.0;  // E[Z_l 1{Z_l in [-z_eps, z_eps], Z_l' > z_eps}]
  double e_two = 0.0;  // E[Z_l Z_l' 1{both in [-z_eps, z_eps]}]
};

TruncatedBivariateTerms truncated_bivariate_terms(const LogisticBoundInputs& in);

// ---- Monte Carlo oracles ----------------------------------------------

struct McGenerator {
  enum class Kind { Uniform, VonMises, ProjectedNormal, Svm, SvmpMixture, Svmp2 } kind =
      Kind::Uniform;
  VonMisesParams vm;                 // VonMises
  Pn2Params pn2;                     // ProjectedNormal; also the GP margin for Svm
  double svm_rho = 1.0;              // Svm observation concentration
  std::vector<double> ms, rhos, probs;  // SvmpMixture / Svmp2 (probs ignored for Svmp2)
};

double mc_draw(const McGenerator& gen, Rng& rng);

struct McMoments {
  CircularSummary summary;
  double mean_se = 0.0;      // circular-mean standard error (block based)
  double variance_se = 0.0;  // block-based SE of the variance estimate
};

McMoments mc_moment_oracle(const McGenerator& gen, std::int64_t n_samples, Rng& rng,
                           int blocks = 16, int threads = 1);

struct McPairGenerator {
  enum class Kind { SvmPair, SvmpJointLabels, Svmp2Latent } kind = Kind::SvmPair;
  // SvmPair: latent pair (z1, z2) at two locations with kernel correlation
  // `corr`; GP margin from `base`, observation concentration `rho`.
  Pn2Params base;
  double corr = 0.0;
  double rho = 1.0;
  // SvmpJointLabels: labels from `joint`; Svmp2Latent: labels from the
  // inverse-logit of N(0, [[1,s],[s,1]]) latents with s = corr.
  std::vector<double> ms, rhos;
  Eigen::MatrixXd joint;
};

struct McCorrelation {
  double value = 0.0;
  double se = 0.0;
  double numerator = 0.0;  // E[sin(y - a) sin(y' - a')] estimate
};

// Plug-in circular correlation around supplied means alpha_l / alpha_lp.
McCorrelation mc_pair_correlation(const McPairGenerator& gen, double alpha_l,
                                  double alpha_lp, std::int64_t n_samples, Rng& rng,
                                  int blocks = 16);

struct McEstimate {
  double value = 0.0;
  double se = 0.0;
};

// MC estimate of E[psi^{-1}(Z_l) psi^{-1}(Z_l')] for the sandwich check.
McEstimate mc_logistic_product(double s, std::int64_t n_samples, Rng& rng, int blocks = 16);

}  // namespace simplexdir

#endif

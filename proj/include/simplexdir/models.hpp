#ifndef SIMPLEXDIR_MODELS_HPP_
#define SIMPLEXDIR_MODELS_HPP_

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "simplexdir/circular.hpp"
#include "simplexdir/data.hpp"
#include "simplexdir/gp.hpp"

namespace simplexdir {

enum class ModelKind { IV, IVM, SVM, SVMC, SVMP };

std::string model_name(ModelKind kind);
ModelKind model_from_name(const std::string& name);

enum class Parametrization { Centered, NonCentered };

struct ConcPrior {
  enum class Type { Hierarchical, Gamma };
  Type type = Type::Hierarchical;
  double varsigma = 0.05;  // lower-level sd, fixed (not sampled)
  double tau = 5.0;        // hyperprior sd on nu
  double a = 1.0, b = 1.0; // Gamma(a, b) on rho
};

struct MeanPrior {
  double u = 0.0;
  double c = 0.0;  // vM(u, c); c = 0 is the uniform prior
};

struct ModelSpec {
  ModelKind kind = ModelKind::SVM;
  int K = 1;
  GpSpec gp;  // kernel hyperparameters; means live below
  // Per-component GP means (mu_{k,1}, mu_{k,2}); empty vector = 0,
  // size 1 = constant, size n = per-location.
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> gp_means;
  // SVMP: means of the K-1 mixing-probability GPs.
  std::vector<Eigen::VectorXd> mix_gp_means;
  ConcPrior conc_prior;
  MeanPrior mean_prior;

  bool is_spatial() const { return kind != ModelKind::IV && kind != ModelKind::IVM; }
  bool is_mixture() const { return kind != ModelKind::IV && kind != ModelKind::SVM; }
  void validate() const;
};

// One full latent-parameter configuration. Field use depends on the kind:
//   IV    mean_angle[0], phi[0] (1 value)
//   IVM   mean_angle[K], phi[k] (1 value each), lambda, zeta optional
//   SVM   z1[0], z2[0], phi[0] (per location), nu[0]; m derived by arctan*
//   SVMC  z1[k], z2[k], phi[k] (per location), nu[k], lambda, zeta optional
//   SVMP  zmix[K-1], mean_angle[K], phi[k] (1 value each)
// m_circ/radius hold the circular-parametrization coordinates used by the
// gradient operations: (m, r) when centered, (m~, r~) when non-centered.
struct ParamState {
  std::vector<Eigen::VectorXd> z1, z2;
  std::vector<Eigen::VectorXd> zmix;
  std::vector<Eigen::VectorXd> phi;
  std::vector<double> nu;
  std::vector<double> mean_angle;
  Eigen::VectorXd lambda;
  std::vector<int> zeta;
  Eigen::VectorXd m_circ, radius;

  double rho(int k, int ell) const {
    const Eigen::VectorXd& p = phi[k];
    return std::exp(p.size() == 1 ? p[0] : p[ell]);
  }
};

struct ModelContext {
  bool has_gp = false;
  CovMatrix cov;  // shared kernel Sigma with cached Cholesky
  std::vector<Eigen::VectorXd> mu1, mu2;  // per component, broadcast to n
  std::vector<Eigen::VectorXd> mu_mix;    // SVMP mixing GPs
};

ModelContext prepare_context(const ModelSpec& spec, const Dataset& data);

// Maps R^{K-1} to the open K-simplex; overflow guarded by max-shift.
Eigen::VectorXd generalized_inverse_logit(const Eigen::VectorXd& z);

// Elementwise arctan* of the two latent fields.
Eigen::VectorXd latent_mean_angles(const Eigen::VectorXd& z1, const Eigen::VectorXd& z2);

// Per-location mixing probabilities (K x n) for SVMP states.
Eigen::MatrixXd svmp_mixing_probs(const ModelSpec& spec, const ModelContext& ctx,
                                  const ParamState& state);

double log_likelihood(const ModelSpec& spec, const ModelContext& ctx,
                      const ParamState& state, const Dataset& data);
double log_posterior(const ModelSpec& spec, const ModelContext& ctx,
                     const ParamState& state, const Dataset& data);

// ---- momentum-update gradients and their matching log-posteriors ----
// Gradients are d(log posterior)/d(latent); the matching *_latent_logpost
// functions evaluate the log posterior as a function of the same coordinates
// (everything else held fixed) so central differences can check them.

struct SvmGrad {
  Eigen::VectorXd dm, dr;
};
SvmGrad grad_svm(const ModelSpec& spec, const ModelContext& ctx, const ParamState& state,
                 const Dataset& data, Parametrization par);
double svm_latent_logpost(const ModelSpec& spec, const ModelContext& ctx,
                          const ParamState& state, const Dataset& data, Parametrization par);

struct SvmcGrad {
  std::vector<Eigen::VectorXd> dz1, dz2;
};
SvmcGrad grad_svmc(const ModelSpec& spec, const ModelContext& ctx, const ParamState& state,
                   const Dataset& data, Parametrization par);
double svmc_latent_logpost(const ModelSpec& spec, const ModelContext& ctx,
                           const ParamState& state, const Dataset& data, Parametrization par);

std::vector<Eigen::VectorXd> grad_svmp(const ModelSpec& spec, const ModelContext& ctx,
                                       const ParamState& state, const Dataset& data,
                                       Parametrization par);
// Two-component shortcut through the plain inverse logit; equals the general
// formula at K = 2.
Eigen::VectorXd grad_svmp_two_component(const ModelSpec& spec, const ModelContext& ctx,
                                        const ParamState& state, const Dataset& data,
                                        Parametrization par);
double svmp_latent_logpost(const ModelSpec& spec, const ModelContext& ctx,
                           const ParamState& state, const Dataset& data, Parametrization par);

}  // namespace simplexdir

#endif

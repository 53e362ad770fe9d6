#ifndef SIMPLEXDIR_EM_HPP_
#define SIMPLEXDIR_EM_HPP_

#include <Eigen/Dense>
#include <vector>

#include "simplexdir/models.hpp"
#include "simplexdir/rng.hpp"

namespace simplexdir {

struct Responsibilities {
  Eigen::MatrixXd r;  // K x N, columns sum to 1
};

struct EmConfig {
  int max_iters = 500;
  double tol = 1e-6;     // absolute change of the EM objective
  int inner_iters = 25;  // gradient-ascent steps per M-step block
  double step0 = 0.5;    // initial step, halved on decrease
};

// Regularized EM on the independent mixture with flat priors
// (uniform mean prior, flat improper concentration prior).
struct EmIvmResult {
  Eigen::VectorXd lambda;
  std::vector<double> m;
  Eigen::VectorXd rho;
  Responsibilities resp;
  std::vector<double> trace;  // EM objective per iteration, non-decreasing
  bool converged = false;
};
EmIvmResult em_ivm(const Dataset& data, int K, const EmConfig& cfg, Rng& rng);

// Regularized EM on the non-centered parametrization of the component
// mixture; outputs map onto a sampler starting state.
struct EmSvmcResult {
  Eigen::VectorXd lambda;
  std::vector<Eigen::VectorXd> zt1, zt2;  // whitened latents per component
  std::vector<Eigen::VectorXd> phi;
  std::vector<double> nu;
  Responsibilities resp;
  std::vector<double> trace;
  bool converged = false;
};
EmSvmcResult em_svmc(const Dataset& data, const ModelSpec& spec, const EmConfig& cfg, Rng& rng);

struct EmSvmpResult {
  std::vector<Eigen::VectorXd> zt;  // whitened mixing latents
  std::vector<double> m;
  Eigen::VectorXd rho;
  Responsibilities resp;
  std::vector<double> trace;
  bool converged = false;
};
EmSvmpResult em_svmp(const Dataset& data, const ModelSpec& spec, const EmConfig& cfg, Rng& rng);

// Expected complete-data objective restricted to one whitened-latent block
// (responsibilities and the other parameters taken from the result struct),
// plus its gradient. The M steps use these; exposed so they can be checked
// against finite differences.
double em_svmc_zt_q(const Dataset& data, const ModelSpec& spec, const ModelContext& ctx,
                    const EmSvmcResult& st, int k, int coord, const Eigen::VectorXd& zt);
Eigen::VectorXd em_svmc_zt_grad(const Dataset& data, const ModelSpec& spec,
                                const ModelContext& ctx, const EmSvmcResult& st, int k,
                                int coord, const Eigen::VectorXd& zt);
double em_svmp_zt_q(const Dataset& data, const ModelSpec& spec, const ModelContext& ctx,
                    const EmSvmpResult& st, int k, const Eigen::VectorXd& zt);
Eigen::VectorXd em_svmp_zt_grad(const Dataset& data, const ModelSpec& spec,
                                const ModelContext& ctx, const EmSvmpResult& st, int k,
                                const Eigen::VectorXd& zt);

// Starting states for the samplers.
ParamState initial_state_ivm(const ModelSpec& spec, const EmIvmResult& em);
ParamState initial_state_svmc(const ModelSpec& spec, const ModelContext& ctx,
                              const EmSvmcResult& em);
ParamState initial_state_svmp(const ModelSpec& spec, const ModelContext& ctx,
                              const EmSvmpResult& em);

}  // namespace simplexdir

#endif

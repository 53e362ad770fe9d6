#ifndef SIMPLEXDIR_SAMPLERS_HPP_
#define SIMPLEXDIR_SAMPLERS_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "simplexdir/models.hpp"
#include "simplexdir/rng.hpp"

namespace simplexdir {

struct EssConfig {
  int max_shrink_iters = 64;
};

struct EssResult {
  Eigen::VectorXd f;
  double loglik = 0.0;
  int n_proposals = 0;
  bool exhausted = false;  // shrink budget spent; f is the unchanged input
};

using LogLikFn = std::function<double(const Eigen::VectorXd&)>;
using PriorDrawFn = std::function<Eigen::VectorXd(Rng&)>;

// One elliptical-slice transition for a zero-mean Gaussian prior given by a
// draw function (covariance structure lives in the draw).
EssResult ess_step(const Eigen::VectorXd& f, double cur_loglik, const PriorDrawFn& prior_draw,
                   const LogLikFn& loglik, Rng& rng, const EssConfig& cfg = {});

// Convenience overload taking the prior Cholesky directly.
EssResult ess_step(const Eigen::VectorXd& f, const CovMatrix& prior_chol, const LogLikFn& loglik,
                   Rng& rng, const EssConfig& cfg = {});

struct HmcConfig {
  double step_size = 0.1;
  int leapfrog_steps = 10;
  Eigen::VectorXd mass_diag;  // empty = identity
  bool adapt = true;          // dual averaging toward target_accept during warmup
  double target_accept = 0.8;
};

// Potential: returns U(q) = -log posterior (up to a constant) and fills grad.
using PotentialFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

struct LeapfrogResult {
  Eigen::VectorXd q, p;
  double potential = 0.0;
  bool divergent = false;
};

// Leapfrog trajectory with the given start momentum (unit or diagonal mass).
LeapfrogResult leapfrog(const Eigen::VectorXd& q, const Eigen::VectorXd& p,
                        const PotentialFn& potential, double step_size, int steps,
                        const Eigen::VectorXd& mass_diag = {});

struct HmcResult {
  Eigen::VectorXd q;
  bool accepted = false;
  double delta_h = 0.0;
  bool divergent = false;  // non-finite energy or gradient along the path
};

HmcResult hmc_step(const Eigen::VectorXd& q, const PotentialFn& potential, const HmcConfig& cfg,
                   Rng& rng);

// Nesterov dual averaging on log step size (warmup only).
class DualAveraging {
 public:
  explicit DualAveraging(double eps0, double target = 0.8);
  void update(double accept_prob);
  double current() const { return std::exp(log_eps_); }
  double finalized() const { return std::exp(log_eps_bar_); }

 private:
  double mu_, log_eps_, log_eps_bar_ = 0.0, h_bar_ = 0.0, target_;
  int t_ = 0;
};

struct SamplerSettings {
  int n_chains = 4;
  int n_iter = 10000;   // total iterations per chain
  int n_warmup = 5000;  // discarded, used for adaptation
  int thin = 5;
  int ess_sweeps = 3;   // elliptical-slice updates per iteration
  EssConfig ess;
  HmcConfig hmc;
  int threads = 1;
  std::uint64_t seed = 0;
  std::optional<ParamState> init;  // e.g. from the EM initializers
};

struct Chain {
  std::vector<ParamState> draws;
  std::vector<double> loglik;  // per kept draw
  std::uint64_t seed = 0;
  int n_warmup = 0, n_keep = 0, thin = 1;
  double hmc_accept_rate = 1.0;
  int ess_exhausted = 0;
};

Chain fit_iv(const Dataset& data, const ModelSpec& spec, const SamplerSettings& s,
             std::uint64_t chain_seed);
Chain fit_ivm(const Dataset& data, const ModelSpec& spec, const SamplerSettings& s,
              std::uint64_t chain_seed);
Chain fit_svm(const Dataset& data, const ModelSpec& spec, const SamplerSettings& s,
              std::uint64_t chain_seed);
Chain fit_svmc(const Dataset& data, const ModelSpec& spec, const SamplerSettings& s,
               std::uint64_t chain_seed);
Chain fit_svmp(const Dataset& data, const ModelSpec& spec, const SamplerSettings& s,
               std::uint64_t chain_seed);

// Runs settings.n_chains chains (seeded by chain index) and joins them.
std::vector<Chain> run_chains(const Dataset& data, const ModelSpec& spec,
                              const SamplerSettings& s);

// ---- diagnostics ----
struct ScalarDiag {
  double rhat = 1.0;
  double ess = 0.0;
};

double split_rhat(const std::vector<std::vector<double>>& per_chain);
double effective_sample_size(const std::vector<std::vector<double>>& per_chain);

// Scalar functionals tracked for reporting (per model kind).
std::map<std::string, double> state_functionals(const ModelSpec& spec, const ParamState& state);
std::map<std::string, ScalarDiag> chain_diagnostics(const ModelSpec& spec,
                                                    const std::vector<Chain>& chains);

}  // namespace simplexdir

#endif

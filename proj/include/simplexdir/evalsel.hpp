#ifndef SIMPLEXDIR_EVALSEL_HPP_
#define SIMPLEXDIR_EVALSEL_HPP_

#include <string>
#include <vector>

#include "simplexdir/samplers.hpp"

namespace simplexdir {

enum class ScenarioKind { IV_PI, IVM_MIX, SVM_PI, SVMC, SVMP, SVM_ZERO };

ScenarioKind scenario_from_name(const std::string& name);
std::string scenario_name(ScenarioKind kind);

struct Scenario {
  ScenarioKind kind = ScenarioKind::IV_PI;
  int n_locations = 500;
  std::uint64_t seed = 0;
};

struct SimTruth {
  // per-location mean surfaces (one per GP-linked component)
  std::vector<Eigen::VectorXd> m_surface;
  Eigen::VectorXd rho_surface;       // per-location concentrations (homogeneous kinds)
  std::vector<double> comp_means;    // component means (mixture kinds)
  std::vector<double> comp_rhos;
  Eigen::VectorXd lambda;            // mixing probabilities (IVM/SVMC) or
                                     // per-location first-component probs (SVMP)
  std::vector<int> zeta;             // labels actually drawn
};

struct SimResult {
  Dataset data;
  SimTruth truth;
};

SimResult simulate_scenario(const Scenario& s, Rng& rng);

// Model specs with the simulation-study hyperparameters (omega = 0.1,
// sigma and GP means per kind, varsigma = 0.05, tau = 5).
ModelSpec default_paper_spec(ModelKind kind);

struct PpScore {
  std::string model;
  double log_pp = 0.0;
  double se = 0.0;  // bootstrap over test points
  int n_test = 0;
  int n_pred_draws = 0;
};

enum class AveragingOrder { PosteriorFirst, PredictiveFirst };

// Held-out log score: predictive parameters are drawn by extending each
// posterior draw to the test locations through the GP conditional; per-point
// densities are averaged across posterior draws first, multiplied over test
// points, then averaged across predictive draws (PosteriorFirst).
PpScore log_posterior_predictive(const ModelSpec& spec, const std::vector<Chain>& chains,
                                 const Dataset& train, const Dataset& test, int n_pred_draws,
                                 Rng& rng,
                                 AveragingOrder order = AveragingOrder::PosteriorFirst);

struct Selection {
  int best = -1;
  bool tie = false;
  std::vector<int> tied_with;  // indices within the combined SE of the best
};

Selection select_model(const std::vector<PpScore>& scores);

}  // namespace simplexdir

#endif

#include "simplexdir/evalsel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "simplexdir/bessel.hpp"

namespace simplexdir {

namespace {

double vm_logpdf(double y, double m, double rho) {
  return rho * std::cos(y - m) - std::log(kTwoPi) - log_bessel_i0(rho);
}

SimplexPoint dirichlet1_point(Rng& rng) {
  Eigen::Vector3d e;
  for (int i = 0; i < 3; ++i) e[i] = rng.exponential();
  return SimplexPoint(e / e.sum(), 1e-9);
}

}  // namespace

ScenarioKind scenario_from_name(const std::string& name) {
  if (name == "iv") return ScenarioKind::IV_PI;
  if (name == "ivm") return ScenarioKind::IVM_MIX;
  if (name == "svm") return ScenarioKind::SVM_PI;
  if (name == "svmc") return ScenarioKind::SVMC;
  if (name == "svmp") return ScenarioKind::SVMP;
  if (name == "svm-zero") return ScenarioKind::SVM_ZERO;
  throw std::domain_error("unknown scenario '" + name + "'");
}

std::string scenario_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::IV_PI: return "iv";
    case ScenarioKind::IVM_MIX: return "ivm";
    case ScenarioKind::SVM_PI: return "svm";
    case ScenarioKind::SVMC: return "svmc";
    case ScenarioKind::SVMP: return "svmp";
    case ScenarioKind::SVM_ZERO: return "svm-zero";
  }
  throw std::logic_error("scenario_name");
}

ModelSpec default_paper_spec(ModelKind kind) {
  ModelSpec spec;
  spec.kind = kind;
  spec.gp.omega = 0.1;
  spec.conc_prior.type = ConcPrior::Type::Hierarchical;
  spec.conc_prior.varsigma = 0.05;
  spec.conc_prior.tau = 5.0;
  switch (kind) {
    case ModelKind::IV:
    case ModelKind::IVM:
      spec.K = (kind == ModelKind::IVM) ? 2 : 1;
      spec.conc_prior.type = ConcPrior::Type::Gamma;
      spec.conc_prior.a = 1.0;
      spec.conc_prior.b = 1.0;
      spec.mean_prior.c = 0.0;  // uniform mean prior
      break;
    case ModelKind::SVM:
      spec.K = 1;
      spec.gp.sigma = 0.5;
      spec.gp_means = {{Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 0.0)}};
      break;
    case ModelKind::SVMC:
      spec.K = 2;
      spec.gp.sigma = 0.5;
      spec.gp_means = {{Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 1.0)},
                       {Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, -1.0)}};
      break;
    case ModelKind::SVMP:
      spec.K = 2;
      spec.gp.sigma = 1.0;
      spec.mix_gp_means = {Eigen::VectorXd::Constant(1, 0.0)};
      break;
  }
  return spec;
}

SimResult simulate_scenario(const Scenario& s, Rng& rng) {
  if (s.n_locations < 1) throw std::domain_error("simulate_scenario: need locations");
  SimResult out;
  const int n = s.n_locations;
  out.data.locations.reserve(n);
  for (int i = 0; i < n; ++i) out.data.locations.push_back(dirichlet1_point(rng));
  out.data.directions.resize(n);

  const double pi = std::numbers::pi;
  switch (s.kind) {
    case ScenarioKind::IV_PI: {
      out.truth.comp_means = {pi};
      out.truth.comp_rhos = {5.0};
      for (int i = 0; i < n; ++i)
        out.data.directions[i] = vm_sample({Angle(pi), 5.0}, rng);
      break;
    }
    case ScenarioKind::IVM_MIX: {
      out.truth.comp_means = {pi / 2.0, 3.0 * pi / 2.0};
      out.truth.comp_rhos = {5.0, 10.0};
      out.truth.lambda = Eigen::Vector2d(0.3, 0.7);
      out.truth.zeta.resize(n);
      for (int i = 0; i < n; ++i) {
        const int k = (rng.uniform() < 0.3) ? 0 : 1;
        out.truth.zeta[i] = k;
        out.data.directions[i] =
            vm_sample({Angle(out.truth.comp_means[k]), out.truth.comp_rhos[k]}, rng);
      }
      break;
    }
    case ScenarioKind::SVM_PI:
    case ScenarioKind::SVM_ZERO: {
      GpSpec gp;
      gp.omega = 0.1;
      gp.sigma = 0.5;
      const double mu1 = (s.kind == ScenarioKind::SVM_PI) ? -1.0 : 1.0;  // mean pi vs mean 0
      gp.mean1 = Eigen::VectorXd::Constant(1, mu1);
      gp.mean2 = Eigen::VectorXd::Constant(1, 0.0);
      const auto draw = projected_gp_sample(gp, out.data.locations, rng);
      out.truth.m_surface = {draw.angles};
      out.truth.rho_surface.resize(n);
      const double nu = std::log(3.0);
      for (int i = 0; i < n; ++i) {
        const double phi = nu + 0.05 * rng.normal();
        out.truth.rho_surface[i] = std::exp(phi);
        out.data.directions[i] =
            vm_sample({Angle(draw.angles[i]), out.truth.rho_surface[i]}, rng);
      }
      break;
    }
    case ScenarioKind::SVMC: {
      GpSpec gp;
      gp.omega = 0.1;
      gp.sigma = 0.5;
      out.truth.m_surface.resize(2);
      const double mu2[2] = {1.0, -1.0};  // means pi/2 and 3pi/2
      std::vector<Eigen::VectorXd> rho_k(2);
      const double nus[2] = {std::log(3.0), std::log(8.0)};
      for (int k = 0; k < 2; ++k) {
        gp.mean1 = Eigen::VectorXd::Constant(1, 0.0);
        gp.mean2 = Eigen::VectorXd::Constant(1, mu2[k]);
        const auto draw = projected_gp_sample(gp, out.data.locations, rng);
        out.truth.m_surface[k] = draw.angles;
        rho_k[k].resize(n);
        for (int i = 0; i < n; ++i) rho_k[k][i] = std::exp(nus[k] + 0.05 * rng.normal());
      }
      out.truth.lambda = Eigen::Vector2d(0.5, 0.5);
      out.truth.zeta.resize(n);
      for (int i = 0; i < n; ++i) {
        const int k = (rng.uniform() < 0.5) ? 0 : 1;
        out.truth.zeta[i] = k;
        out.data.directions[i] =
            vm_sample({Angle(out.truth.m_surface[k][i]), rho_k[k][i]}, rng);
      }
      break;
    }
    case ScenarioKind::SVMP: {
      GpSpec gp;
      gp.omega = 0.1;
      gp.sigma = 1.0;
      const CovMatrix cov = build_cov(out.data.locations, gp);
      Eigen::VectorXd xi(n);
      for (int i = 0; i < n; ++i) xi[i] = rng.normal();
      const Eigen::VectorXd z = cov.chol * xi;
      out.truth.comp_means = {pi / 2.0, 3.0 * pi / 2.0};
      out.truth.comp_rhos = {5.0, 10.0};
      out.truth.lambda.resize(n);
      out.truth.zeta.resize(n);
      for (int i = 0; i < n; ++i) {
        const double lam1 = 1.0 / (1.0 + std::exp(-z[i]));
        out.truth.lambda[i] = lam1;
        const int k = (rng.uniform() < lam1) ? 0 : 1;
        out.truth.zeta[i] = k;
        out.data.directions[i] =
            vm_sample({Angle(out.truth.comp_means[k]), out.truth.comp_rhos[k]}, rng);
      }
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------
// Posterior predictive scoring

namespace {

struct GpExtension {
  Eigen::MatrixXd a;        // Sigma_train^{-1} K(train, test), n x m
  Eigen::MatrixXd cond_chol;  // Cholesky of the conditional covariance
};

GpExtension prepare_extension(const ModelSpec& spec, const Dataset& train, const Dataset& test) {
  GpExtension ext;
  const int n = train.n(), m = test.n();
  const CovMatrix ctrain = build_cov(train.locations, spec.gp);
  Eigen::MatrixXd cross(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      cross(i, j) = sqexp_kernel(train.locations[i], test.locations[j], spec.gp);
  Eigen::MatrixXd ktt(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j)
      ktt(i, j) = ktt(j, i) = sqexp_kernel(test.locations[i], test.locations[j], spec.gp);
  const Eigen::MatrixXd half = ctrain.chol.triangularView<Eigen::Lower>().solve(cross);
  ext.a = ctrain.chol.transpose().triangularView<Eigen::Upper>().solve(half);
  Eigen::MatrixXd cond = ktt - half.transpose() * half;
  cond = 0.5 * (cond + cond.transpose());
  cond += 1e-8 * spec.gp.sigma * spec.gp.sigma * Eigen::MatrixXd::Identity(m, m);
  Eigen::LLT<Eigen::MatrixXd> llt(cond);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("log_posterior_predictive: conditional covariance not PD");
  ext.cond_chol = llt.matrixL();
  return ext;
}

Eigen::VectorXd conditional_draw(const GpExtension& ext, const Eigen::VectorXd& train_centered,
                                 double mean, Rng& rng) {
  const int m = static_cast<int>(ext.cond_chol.rows());
  Eigen::VectorXd xi(m);
  for (int i = 0; i < m; ++i) xi[i] = rng.normal();
  return Eigen::VectorXd::Constant(m, mean) + ext.a.transpose() * train_centered +
         ext.cond_chol * xi;
}

}  // namespace

PpScore log_posterior_predictive(const ModelSpec& spec, const std::vector<Chain>& chains,
                                 const Dataset& train, const Dataset& test, int n_pred_draws,
                                 Rng& rng, AveragingOrder order) {
  std::vector<const ParamState*> draws;
  for (const auto& c : chains)
    for (const auto& st : c.draws) draws.push_back(&st);
  if (draws.empty()) throw std::domain_error("log_posterior_predictive: empty chain");
  if (n_pred_draws < 1) throw std::domain_error("log_posterior_predictive: need pred draws");
  test.check();
  const int nd = static_cast<int>(draws.size());
  const int m = test.n();
  const int nj = n_pred_draws;
  const double varsig = spec.conc_prior.varsigma;

  GpExtension ext;
  if (spec.is_spatial()) ext = prepare_extension(spec, train, test);
  const ModelContext ctx = spec.is_spatial() ? prepare_context(spec, train) : ModelContext{};

  // dens(t, i, j) accumulated into the order-appropriate per-point average
  const int cols = (order == AveragingOrder::PosteriorFirst) ? nj : nd;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(m, cols);

  for (int i = 0; i < nd; ++i) {
    const ParamState& st = *draws[i];
    for (int j = 0; j < nj; ++j) {
      Rng sub = rng.substream(static_cast<std::uint64_t>(i) * nj + j + 1);
      Eigen::VectorXd logp_t(m);
      switch (spec.kind) {
        case ModelKind::IV: {
          for (int t = 0; t < m; ++t)
            logp_t[t] = vm_logpdf(test.directions[t], st.mean_angle[0], st.rho(0, 0));
          break;
        }
        case ModelKind::IVM: {
          for (int t = 0; t < m; ++t) {
            double p = 0.0;
            for (int k = 0; k < spec.K; ++k)
              p += st.lambda[k] *
                   std::exp(vm_logpdf(test.directions[t], st.mean_angle[k], st.rho(k, 0)));
            logp_t[t] = std::log(p);
          }
          break;
        }
        case ModelKind::SVM: {
          const Eigen::VectorXd z1s =
              conditional_draw(ext, st.z1[0] - ctx.mu1[0], ctx.mu1[0][0], sub);
          const Eigen::VectorXd z2s =
              conditional_draw(ext, st.z2[0] - ctx.mu2[0], ctx.mu2[0][0], sub);
          for (int t = 0; t < m; ++t) {
            const double ms = arctan_star(z1s[t], z2s[t]);
            const double phis = st.nu[0] + varsig * sub.normal();
            logp_t[t] = vm_logpdf(test.directions[t], ms, std::exp(phis));
          }
          break;
        }
        case ModelKind::SVMC: {
          std::vector<Eigen::VectorXd> ms(spec.K);
          for (int k = 0; k < spec.K; ++k) {
            const Eigen::VectorXd z1s =
                conditional_draw(ext, st.z1[k] - ctx.mu1[k], ctx.mu1[k][0], sub);
            const Eigen::VectorXd z2s =
                conditional_draw(ext, st.z2[k] - ctx.mu2[k], ctx.mu2[k][0], sub);
            ms[k] = latent_mean_angles(z1s, z2s);
          }
          for (int t = 0; t < m; ++t) {
            double p = 0.0;
            for (int k = 0; k < spec.K; ++k) {
              const double phis = st.nu[k] + varsig * sub.normal();
              p += st.lambda[k] *
                   std::exp(vm_logpdf(test.directions[t], ms[k][t], std::exp(phis)));
            }
            logp_t[t] = std::log(p);
          }
          break;
        }
        case ModelKind::SVMP: {
          std::vector<Eigen::VectorXd> zs(spec.K - 1);
          for (int k = 0; k + 1 < spec.K; ++k)
            zs[k] = conditional_draw(ext, st.zmix[k] - ctx.mu_mix[k], ctx.mu_mix[k][0], sub);
          Eigen::VectorXd zl(spec.K - 1);
          for (int t = 0; t < m; ++t) {
            for (int k = 0; k + 1 < spec.K; ++k) zl[k] = zs[k][t];
            const Eigen::VectorXd lam = generalized_inverse_logit(zl);
            double p = 0.0;
            for (int k = 0; k < spec.K; ++k)
              p += lam[k] *
                   std::exp(vm_logpdf(test.directions[t], st.mean_angle[k], st.rho(k, 0)));
            logp_t[t] = std::log(p);
          }
          break;
        }
      }
      const int col = (order == AveragingOrder::PosteriorFirst) ? j : i;
      acc.col(col) += logp_t.array().exp().matrix();
    }
  }
  const double inner_n = (order == AveragingOrder::PosteriorFirst) ? nd : nj;
  const Eigen::MatrixXd logq = (acc / inner_n).array().log().matrix();  // m x cols

  auto score_from = [&](const std::vector<int>& idx) {
    // log mean_j exp( sum_t log q_{t,j} )
    Eigen::VectorXd s = Eigen::VectorXd::Zero(cols);
    for (int t : idx) s += logq.row(t).transpose();
    const double mx = s.maxCoeff();
    double acc2 = 0.0;
    for (int j = 0; j < cols; ++j) acc2 += std::exp(s[j] - mx);
    return mx + std::log(acc2 / cols);
  };
  std::vector<int> all(m);
  for (int t = 0; t < m; ++t) all[t] = t;

  PpScore out;
  out.model = model_name(spec.kind);
  out.log_pp = score_from(all);
  out.n_test = m;
  out.n_pred_draws = nj;
  // bootstrap over test points
  const int B = 200;
  Rng brng = rng.substream(0xB00);
  std::vector<double> boot(B);
  std::vector<int> idx(m);
  for (int b = 0; b < B; ++b) {
    for (int t = 0; t < m; ++t) idx[t] = static_cast<int>(brng.uniform() * m) % m;
    boot[b] = score_from(idx);
  }
  double bm = 0.0;
  for (double v : boot) bm += v;
  bm /= B;
  double ss = 0.0;
  for (double v : boot) ss += (v - bm) * (v - bm);
  out.se = std::sqrt(ss / (B - 1));
  return out;
}

Selection select_model(const std::vector<PpScore>& scores) {
  if (scores.empty()) throw std::domain_error("select_model: empty score list");
  Selection sel;
  sel.best = 0;
  for (int i = 1; i < static_cast<int>(scores.size()); ++i)
    if (scores[i].log_pp > scores[sel.best].log_pp) sel.best = i;
  for (int i = 0; i < static_cast<int>(scores.size()); ++i) {
    if (i == sel.best) continue;
    const double gap = scores[sel.best].log_pp - scores[i].log_pp;
    if (gap <= scores[sel.best].se + scores[i].se) {
      sel.tie = true;
      sel.tied_with.push_back(i);
    }
  }
  return sel;
}

}  // namespace simplexdir

#include "simplexdir/models.hpp"

#include <cmath>
#include <stdexcept>

#include "simplexdir/bessel.hpp"

namespace simplexdir {

namespace {

double vm_logpdf(double y, double m, double rho) {
  return rho * std::cos(y - m) - std::log(kTwoPi) - log_bessel_i0(rho);
}

double normal_logpdf(double x, double mu, double sd) {
  const double z = (x - mu) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(kTwoPi);
}

// log N(z | mu, Sigma) through the cached Cholesky factor.
double mvn_logpdf(const Eigen::VectorXd& z, const Eigen::VectorXd& mu, const CovMatrix& cov) {
  const Eigen::VectorXd w = cov.chol.triangularView<Eigen::Lower>().solve(z - mu);
  double logdet = 0.0;
  for (int i = 0; i < cov.n(); ++i) logdet += std::log(cov.chol(i, i));
  return -0.5 * w.squaredNorm() - logdet - 0.5 * cov.n() * std::log(kTwoPi);
}

double std_normal_vec_logpdf(const Eigen::VectorXd& z) {
  return -0.5 * z.squaredNorm() - 0.5 * z.size() * std::log(kTwoPi);
}

// log prior of rho under Gamma(a, b), expressed in phi = log rho.
double gamma_logpdf_in_phi(double phi, double a, double b) {
  return a * phi - b * std::exp(phi) + a * std::log(b) - std::lgamma(a);
}

Eigen::VectorXd broadcast(const Eigen::VectorXd& v, int n) {
  if (v.size() == 0) return Eigen::VectorXd::Zero(n);
  if (v.size() == 1) return Eigen::VectorXd::Constant(n, v[0]);
  if (v.size() != n) throw std::domain_error("mean vector length mismatch");
  return v;
}

void require_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw std::domain_error(std::string(what) + ": non-finite value");
}

void check_state(const ModelSpec& spec, const ParamState& state, const Dataset& data) {
  const int n = data.n();
  const int k = spec.K;
  auto need = [&](bool ok, const char* msg) {
    if (!ok) throw std::domain_error(std::string("ParamState: ") + msg);
  };
  switch (spec.kind) {
    case ModelKind::IV:
      need(state.mean_angle.size() == 1, "IV needs one mean angle");
      need(state.phi.size() == 1 && state.phi[0].size() == 1, "IV needs one phi");
      break;
    case ModelKind::IVM:
      need(static_cast<int>(state.mean_angle.size()) == k, "IVM mean count");
      need(static_cast<int>(state.phi.size()) == k, "IVM phi count");
      need(state.lambda.size() == k, "IVM lambda size");
      break;
    case ModelKind::SVM:
      need(state.z1.size() == 1 && state.z2.size() == 1, "SVM latent pair");
      need(state.z1[0].size() == n && state.z2[0].size() == n, "SVM latent length");
      need(state.phi.size() == 1 && state.phi[0].size() == n, "SVM phi length");
      need(state.nu.size() == 1, "SVM nu");
      break;
    case ModelKind::SVMC:
      need(static_cast<int>(state.z1.size()) == k && static_cast<int>(state.z2.size()) == k,
           "SVMC latent pairs");
      for (int j = 0; j < k; ++j)
        need(state.z1[j].size() == n && state.z2[j].size() == n, "SVMC latent length");
      need(static_cast<int>(state.phi.size()) == k, "SVMC phi count");
      for (int j = 0; j < k; ++j) need(state.phi[j].size() == n, "SVMC phi length");
      need(static_cast<int>(state.nu.size()) == k, "SVMC nu count");
      need(state.lambda.size() == k, "SVMC lambda size");
      break;
    case ModelKind::SVMP:
      need(static_cast<int>(state.zmix.size()) == k - 1, "SVMP mixing latents");
      for (const auto& z : state.zmix) need(z.size() == n, "SVMP latent length");
      need(static_cast<int>(state.mean_angle.size()) == k, "SVMP mean count");
      need(static_cast<int>(state.phi.size()) == k, "SVMP phi count");
      break;
  }
  for (const auto& v : state.phi) require_finite(v, "phi");
  for (const auto& v : state.z1) require_finite(v, "z1");
  for (const auto& v : state.z2) require_finite(v, "z2");
  for (const auto& v : state.zmix) require_finite(v, "zmix");
  for (double v : state.nu)
    if (!std::isfinite(v)) throw std::domain_error("ParamState: nu non-finite");
  if (!state.zeta.empty()) {
    need(static_cast<int>(state.zeta.size()) == n, "zeta length");
    for (int z : state.zeta) need(z >= 0 && z < k, "zeta out of range");
  }
}

}  // namespace

std::string model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::IV: return "iv";
    case ModelKind::IVM: return "ivm";
    case ModelKind::SVM: return "svm";
    case ModelKind::SVMC: return "svmc";
    case ModelKind::SVMP: return "svmp";
  }
  throw std::logic_error("model_name");
}

ModelKind model_from_name(const std::string& name) {
  if (name == "iv") return ModelKind::IV;
  if (name == "ivm") return ModelKind::IVM;
  if (name == "svm") return ModelKind::SVM;
  if (name == "svmc") return ModelKind::SVMC;
  if (name == "svmp") return ModelKind::SVMP;
  throw std::domain_error("unknown model '" + name + "'");
}

void ModelSpec::validate() const {
  if (K < 1) throw std::domain_error("ModelSpec: K must be >= 1");
  if ((kind == ModelKind::IV || kind == ModelKind::SVM) && K != 1)
    throw std::domain_error("ModelSpec: K must be 1 for IV/SVM");
  if ((kind == ModelKind::IVM || kind == ModelKind::SVMC || kind == ModelKind::SVMP) && K < 2)
    throw std::domain_error("ModelSpec: mixture kinds need K >= 2");
  if (conc_prior.type == ConcPrior::Type::Hierarchical &&
      (conc_prior.varsigma <= 0.0 || conc_prior.tau <= 0.0))
    throw std::domain_error("ModelSpec: hierarchical prior needs varsigma, tau > 0");
}

ModelContext prepare_context(const ModelSpec& spec, const Dataset& data) {
  spec.validate();
  data.check();
  ModelContext ctx;
  const int n = data.n();
  if (!spec.is_spatial()) return ctx;
  ctx.has_gp = true;
  ctx.cov = build_cov(data.locations, spec.gp);
  if (spec.kind == ModelKind::SVMP) {
    ctx.mu_mix.resize(spec.K - 1);
    for (int k = 0; k + 1 < spec.K; ++k) {
      const Eigen::VectorXd src =
          (static_cast<int>(spec.mix_gp_means.size()) > k) ? spec.mix_gp_means[k] : Eigen::VectorXd();
      ctx.mu_mix[k] = broadcast(src, n);
    }
  } else {
    const int kcomp = (spec.kind == ModelKind::SVM) ? 1 : spec.K;
    ctx.mu1.resize(kcomp);
    ctx.mu2.resize(kcomp);
    for (int k = 0; k < kcomp; ++k) {
      Eigen::VectorXd m1, m2;
      if (static_cast<int>(spec.gp_means.size()) > k) {
        m1 = spec.gp_means[k].first;
        m2 = spec.gp_means[k].second;
      }
      ctx.mu1[k] = broadcast(m1, n);
      ctx.mu2[k] = broadcast(m2, n);
    }
  }
  return ctx;
}

Eigen::VectorXd generalized_inverse_logit(const Eigen::VectorXd& z) {
  const int km1 = static_cast<int>(z.size());
  Eigen::VectorXd out(km1 + 1);
  const double shift = std::max(0.0, z.size() ? z.maxCoeff() : 0.0);
  double denom = std::exp(-shift);  // the implicit z_K = 0 entry
  for (int k = 0; k < km1; ++k) {
    out[k] = std::exp(z[k] - shift);
    denom += out[k];
  }
  for (int k = 0; k < km1; ++k) out[k] /= denom;
  out[km1] = std::exp(-shift) / denom;
  return out;
}

Eigen::VectorXd latent_mean_angles(const Eigen::VectorXd& z1, const Eigen::VectorXd& z2) {
  Eigen::VectorXd m(z1.size());
  for (int i = 0; i < z1.size(); ++i) m[i] = arctan_star(z1[i], z2[i]);
  return m;
}

Eigen::MatrixXd svmp_mixing_probs(const ModelSpec& spec, const ModelContext&,
                                  const ParamState& state) {
  const int n = static_cast<int>(state.zmix.empty() ? 0 : state.zmix[0].size());
  Eigen::MatrixXd lam(spec.K, n);
  Eigen::VectorXd zl(spec.K - 1);
  for (int ell = 0; ell < n; ++ell) {
    for (int k = 0; k + 1 < spec.K; ++k) zl[k] = state.zmix[k][ell];
    lam.col(ell) = generalized_inverse_logit(zl);
  }
  return lam;
}

double log_likelihood(const ModelSpec& spec, const ModelContext& ctx,
                      const ParamState& state, const Dataset& data) {
  check_state(spec, state, data);
  const int n = data.n();
  double ll = 0.0;
  switch (spec.kind) {
    case ModelKind::IV: {
      const double m = state.mean_angle[0];
      const double rho = state.rho(0, 0);
      for (int i = 0; i < n; ++i) ll += data.weight(i) * vm_logpdf(data.directions[i], m, rho);
      return ll;
    }
    case ModelKind::IVM: {
      if (!state.zeta.empty()) {
        for (int i = 0; i < n; ++i) {
          const int k = state.zeta[i];
          ll += data.weight(i) * vm_logpdf(data.directions[i], state.mean_angle[k], state.rho(k, 0));
        }
        return ll;
      }
      for (int i = 0; i < n; ++i) {
        double p = 0.0;
        for (int k = 0; k < spec.K; ++k)
          p += state.lambda[k] *
               std::exp(vm_logpdf(data.directions[i], state.mean_angle[k], state.rho(k, 0)));
        ll += data.weight(i) * std::log(p);
      }
      return ll;
    }
    case ModelKind::SVM: {
      const Eigen::VectorXd m = latent_mean_angles(state.z1[0], state.z2[0]);
      for (int i = 0; i < n; ++i)
        ll += data.weight(i) * vm_logpdf(data.directions[i], m[i], state.rho(0, i));
      return ll;
    }
    case ModelKind::SVMC: {
      std::vector<Eigen::VectorXd> m(spec.K);
      for (int k = 0; k < spec.K; ++k) m[k] = latent_mean_angles(state.z1[k], state.z2[k]);
      if (!state.zeta.empty()) {
        for (int i = 0; i < n; ++i) {
          const int k = state.zeta[i];
          ll += data.weight(i) * vm_logpdf(data.directions[i], m[k][i], state.rho(k, i));
        }
        return ll;
      }
      for (int i = 0; i < n; ++i) {
        double p = 0.0;
        for (int k = 0; k < spec.K; ++k)
          p += state.lambda[k] * std::exp(vm_logpdf(data.directions[i], m[k][i], state.rho(k, i)));
        ll += data.weight(i) * std::log(p);
      }
      return ll;
    }
    case ModelKind::SVMP: {
      const Eigen::MatrixXd lam = svmp_mixing_probs(spec, ctx, state);
      for (int i = 0; i < n; ++i) {
        double p = 0.0;
        for (int k = 0; k < spec.K; ++k)
          p += lam(k, i) *
               std::exp(vm_logpdf(data.directions[i], state.mean_angle[k], state.rho(k, 0)));
        ll += data.weight(i) * std::log(p);
      }
      return ll;
    }
  }
  throw std::logic_error("log_likelihood: unknown kind");
}

double log_posterior(const ModelSpec& spec, const ModelContext& ctx,
                     const ParamState& state, const Dataset& data) {
  double lp = log_likelihood(spec, ctx, state, data);
  const auto& cp = spec.conc_prior;
  const auto& mp = spec.mean_prior;
  switch (spec.kind) {
    case ModelKind::IV: {
      lp += (mp.c > 0.0) ? vm_logpdf(state.mean_angle[0], mp.u, mp.c) : -std::log(kTwoPi);
      lp += gamma_logpdf_in_phi(state.phi[0][0], cp.a, cp.b);
      return lp;
    }
    case ModelKind::IVM: {
      for (int k = 0; k < spec.K; ++k) {
        lp += (mp.c > 0.0) ? vm_logpdf(state.mean_angle[k], mp.u, mp.c) : -std::log(kTwoPi);
        lp += gamma_logpdf_in_phi(state.phi[k][0], cp.a, cp.b);
      }
      lp += std::lgamma(static_cast<double>(spec.K));  // symmetric Dirichlet(1)
      if (!state.zeta.empty())
        for (int i = 0; i < data.n(); ++i) lp += std::log(state.lambda[state.zeta[i]]);
      return lp;
    }
    case ModelKind::SVM: {
      lp += mvn_logpdf(state.z1[0], ctx.mu1[0], ctx.cov);
      lp += mvn_logpdf(state.z2[0], ctx.mu2[0], ctx.cov);
      for (int i = 0; i < data.n(); ++i)
        lp += normal_logpdf(state.phi[0][i], state.nu[0], cp.varsigma);
      lp += normal_logpdf(state.nu[0], 0.0, cp.tau);
      return lp;
    }
    case ModelKind::SVMC: {
      for (int k = 0; k < spec.K; ++k) {
        lp += mvn_logpdf(state.z1[k], ctx.mu1[k], ctx.cov);
        lp += mvn_logpdf(state.z2[k], ctx.mu2[k], ctx.cov);
        for (int i = 0; i < data.n(); ++i)
          lp += normal_logpdf(state.phi[k][i], state.nu[k], cp.varsigma);
        lp += normal_logpdf(state.nu[k], 0.0, cp.tau);
      }
      lp += std::lgamma(static_cast<double>(spec.K));
      if (!state.zeta.empty())
        for (int i = 0; i < data.n(); ++i) lp += std::log(state.lambda[state.zeta[i]]);
      return lp;
    }
    case ModelKind::SVMP: {
      for (int k = 0; k + 1 < spec.K; ++k) lp += mvn_logpdf(state.zmix[k], ctx.mu_mix[k], ctx.cov);
      for (int k = 0; k < spec.K; ++k) {
        lp += -std::log(kTwoPi);  // Unif(0, 2pi) mean prior
        lp += gamma_logpdf_in_phi(state.phi[k][0], 1.0, 1.0);
      }
      return lp;
    }
  }
  throw std::logic_error("log_posterior: unknown kind");
}

// ---------------------------------------------------------------------
// SVM circular parametrizations

namespace {

void check_svm_circ(const ModelSpec& spec, const ParamState& state, const Dataset& data,
                    Parametrization par) {
  if (spec.kind != ModelKind::SVM) throw std::domain_error("grad_svm: SVM spec required");
  const int n = data.n();
  if (state.radius.size() != n)
    throw std::domain_error(par == Parametrization::Centered
                                ? "grad_svm: centered mode requires radii"
                                : "grad_svm: non-centered mode requires standardized radii");
  if (state.m_circ.size() != n) throw std::domain_error("grad_svm: m_circ length mismatch");
  if (state.phi.size() != 1 || state.phi[0].size() != n || state.nu.size() != 1)
    throw std::domain_error("grad_svm: phi/nu missing");
  for (int i = 0; i < n; ++i)
    if (!(state.radius[i] > 0.0)) throw std::domain_error("grad_svm: radii must be positive");
  require_finite(state.m_circ, "m_circ");
  require_finite(state.radius, "radius");
}

}  // namespace

double svm_latent_logpost(const ModelSpec& spec, const ModelContext& ctx,
                          const ParamState& state, const Dataset& data, Parametrization par) {
  check_svm_circ(spec, state, data, par);
  const int n = data.n();
  const Eigen::VectorXd& mc = state.m_circ;
  const Eigen::VectorXd& r = state.radius;
  double lp = 0.0;
  if (par == Parametrization::Centered) {
    Eigen::VectorXd z1(n), z2(n);
    for (int i = 0; i < n; ++i) {
      z1[i] = r[i] * std::cos(mc[i]);
      z2[i] = r[i] * std::sin(mc[i]);
    }
    for (int i = 0; i < n; ++i)
      lp += data.weight(i) * vm_logpdf(data.directions[i], mc[i], state.rho(0, i));
    for (int i = 0; i < n; ++i) lp += std::log(r[i]);
    lp += mvn_logpdf(z1, ctx.mu1[0], ctx.cov);
    lp += mvn_logpdf(z2, ctx.mu2[0], ctx.cov);
  } else {
    Eigen::VectorXd zt1(n), zt2(n);
    for (int i = 0; i < n; ++i) {
      zt1[i] = r[i] * std::cos(mc[i]);
      zt2[i] = r[i] * std::sin(mc[i]);
    }
    const Eigen::VectorXd z1 = ctx.cov.chol * zt1 + ctx.mu1[0];
    const Eigen::VectorXd z2 = ctx.cov.chol * zt2 + ctx.mu2[0];
    const Eigen::VectorXd m = latent_mean_angles(z1, z2);
    for (int i = 0; i < n; ++i)
      lp += data.weight(i) * vm_logpdf(data.directions[i], m[i], state.rho(0, i));
    // p(r~) = r~ exp(-r~^2/2); m~ uniform on [0, 2pi)
    for (int i = 0; i < n; ++i) lp += std::log(r[i]) - 0.5 * r[i] * r[i] - std::log(kTwoPi);
  }
  for (int i = 0; i < n; ++i)
    lp += normal_logpdf(state.phi[0][i], state.nu[0], spec.conc_prior.varsigma);
  lp += normal_logpdf(state.nu[0], 0.0, spec.conc_prior.tau);
  return lp;
}

SvmGrad grad_svm(const ModelSpec& spec, const ModelContext& ctx, const ParamState& state,
                 const Dataset& data, Parametrization par) {
  check_svm_circ(spec, state, data, par);
  const int n = data.n();
  const Eigen::VectorXd& mc = state.m_circ;
  const Eigen::VectorXd& r = state.radius;
  SvmGrad g;
  g.dm.resize(n);
  g.dr.resize(n);
  if (par == Parametrization::Centered) {
    Eigen::VectorXd z1(n), z2(n);
    for (int i = 0; i < n; ++i) {
      z1[i] = r[i] * std::cos(mc[i]);
      z2[i] = r[i] * std::sin(mc[i]);
    }
    const Eigen::VectorXd s1 = ctx.cov.solve(z1 - ctx.mu1[0]);
    const Eigen::VectorXd s2 = ctx.cov.solve(z2 - ctx.mu2[0]);
    for (int i = 0; i < n; ++i) {
      const double rho = state.rho(0, i);
      const double data_term = data.weight(i) * rho * std::sin(data.directions[i] - mc[i]);
      g.dm[i] = data_term + r[i] * std::sin(mc[i]) * s1[i] - r[i] * std::cos(mc[i]) * s2[i];
      g.dr[i] = 1.0 / r[i] - std::cos(mc[i]) * s1[i] - std::sin(mc[i]) * s2[i];
    }
  } else {
    Eigen::VectorXd zt1(n), zt2(n);
    for (int i = 0; i < n; ++i) {
      zt1[i] = r[i] * std::cos(mc[i]);
      zt2[i] = r[i] * std::sin(mc[i]);
    }
    const Eigen::VectorXd z1 = ctx.cov.chol * zt1 + ctx.mu1[0];
    const Eigen::VectorXd z2 = ctx.cov.chol * zt2 + ctx.mu2[0];
    Eigen::VectorXd u1(n), u2(n);
    for (int i = 0; i < n; ++i) {
      const double m = arctan_star(z1[i], z2[i]);
      const double rr = z1[i] * z1[i] + z2[i] * z2[i];
      const double gdat = data.weight(i) * state.rho(0, i) * std::sin(data.directions[i] - m);
      u1[i] = gdat * (-z2[i] / rr);
      u2[i] = gdat * (z1[i] / rr);
    }
    const Eigen::VectorXd w1 = ctx.cov.chol.transpose() * u1;
    const Eigen::VectorXd w2 = ctx.cov.chol.transpose() * u2;
    for (int i = 0; i < n; ++i) {
      const double cm = std::cos(mc[i]), sm = std::sin(mc[i]);
      g.dm[i] = r[i] * (-sm * w1[i] + cm * w2[i]);
      g.dr[i] = cm * w1[i] + sm * w2[i] + 1.0 / r[i] - r[i];
    }
  }
  return g;
}

// ---------------------------------------------------------------------
// SVMC marginalized gradients in the latent fields

double svmc_latent_logpost(const ModelSpec& spec, const ModelContext& ctx,
                           const ParamState& state, const Dataset& data, Parametrization par) {
  if (spec.kind != ModelKind::SVMC) throw std::domain_error("grad_svmc: SVMC spec required");
  const int n = data.n();
  double lp = 0.0;
  std::vector<Eigen::VectorXd> m(spec.K);
  for (int k = 0; k < spec.K; ++k) {
    if (par == Parametrization::Centered) {
      m[k] = latent_mean_angles(state.z1[k], state.z2[k]);
      lp += mvn_logpdf(state.z1[k], ctx.mu1[k], ctx.cov);
      lp += mvn_logpdf(state.z2[k], ctx.mu2[k], ctx.cov);
    } else {
      const Eigen::VectorXd z1 = ctx.cov.chol * state.z1[k] + ctx.mu1[k];
      const Eigen::VectorXd z2 = ctx.cov.chol * state.z2[k] + ctx.mu2[k];
      m[k] = latent_mean_angles(z1, z2);
      lp += std_normal_vec_logpdf(state.z1[k]);
      lp += std_normal_vec_logpdf(state.z2[k]);
    }
  }
  for (int i = 0; i < n; ++i) {
    double p = 0.0;
    for (int k = 0; k < spec.K; ++k)
      p += state.lambda[k] * std::exp(vm_logpdf(data.directions[i], m[k][i], state.rho(k, i)));
    lp += data.weight(i) * std::log(p);
  }
  return lp;
}

SvmcGrad grad_svmc(const ModelSpec& spec, const ModelContext& ctx, const ParamState& state,
                   const Dataset& data, Parametrization par) {
  if (spec.kind != ModelKind::SVMC) throw std::domain_error("grad_svmc: SVMC spec required");
  const int n = data.n();
  SvmcGrad g;
  g.dz1.resize(spec.K);
  g.dz2.resize(spec.K);
  std::vector<Eigen::VectorXd> z1(spec.K), z2(spec.K), m(spec.K);
  for (int k = 0; k < spec.K; ++k) {
    if (par == Parametrization::Centered) {
      z1[k] = state.z1[k];
      z2[k] = state.z2[k];
    } else {
      z1[k] = ctx.cov.chol * state.z1[k] + ctx.mu1[k];
      z2[k] = ctx.cov.chol * state.z2[k] + ctx.mu2[k];
    }
    m[k] = latent_mean_angles(z1[k], z2[k]);
  }
  // responsibilities under the marginalized likelihood
  Eigen::MatrixXd w(spec.K, n);
  for (int i = 0; i < n; ++i) {
    double tot = 0.0;
    for (int k = 0; k < spec.K; ++k) {
      const double p =
          state.lambda[k] * std::exp(vm_logpdf(data.directions[i], m[k][i], state.rho(k, i)));
      w(k, i) = p;
      tot += p;
    }
    w.col(i) /= tot;
  }
  for (int k = 0; k < spec.K; ++k) {
    Eigen::VectorXd u1(n), u2(n);
    for (int i = 0; i < n; ++i) {
      const double rr = z1[k][i] * z1[k][i] + z2[k][i] * z2[k][i];
      const double gdat = data.weight(i) * w(k, i) * state.rho(k, i) *
                          std::sin(data.directions[i] - m[k][i]);
      u1[i] = gdat * (-z2[k][i] / rr);
      u2[i] = gdat * (z1[k][i] / rr);
    }
    if (par == Parametrization::Centered) {
      g.dz1[k] = u1 - ctx.cov.solve(z1[k] - ctx.mu1[k]);
      g.dz2[k] = u2 - ctx.cov.solve(z2[k] - ctx.mu2[k]);
    } else {
      g.dz1[k] = ctx.cov.chol.transpose() * u1 - state.z1[k];
      g.dz2[k] = ctx.cov.chol.transpose() * u2 - state.z2[k];
    }
  }
  return g;
}

// ---------------------------------------------------------------------
// SVMP mixing-probability gradients

namespace {

std::vector<Eigen::VectorXd> svmp_centered_z(const ModelSpec& spec, const ModelContext& ctx,
                                             const ParamState& state, Parametrization par) {
  std::vector<Eigen::VectorXd> z(spec.K - 1);
  for (int k = 0; k + 1 < spec.K; ++k) {
    z[k] = (par == Parametrization::Centered)
               ? state.zmix[k]
               : (ctx.cov.chol * state.zmix[k] + ctx.mu_mix[k]).eval();
  }
  return z;
}

}  // namespace

double svmp_latent_logpost(const ModelSpec& spec, const ModelContext& ctx,
                           const ParamState& state, const Dataset& data, Parametrization par) {
  if (spec.kind != ModelKind::SVMP) throw std::domain_error("grad_svmp: SVMP spec required");
  const int n = data.n();
  const auto z = svmp_centered_z(spec, ctx, state, par);
  double lp = 0.0;
  Eigen::VectorXd zl(spec.K - 1);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k + 1 < spec.K; ++k) zl[k] = z[k][i];
    const Eigen::VectorXd lam = generalized_inverse_logit(zl);
    double p = 0.0;
    for (int k = 0; k < spec.K; ++k)
      p += lam[k] * std::exp(vm_logpdf(data.directions[i], state.mean_angle[k], state.rho(k, 0)));
    lp += data.weight(i) * std::log(p);
  }
  for (int k = 0; k + 1 < spec.K; ++k) {
    lp += (par == Parametrization::Centered) ? mvn_logpdf(z[k], ctx.mu_mix[k], ctx.cov)
                                             : std_normal_vec_logpdf(state.zmix[k]);
  }
  return lp;
}

std::vector<Eigen::VectorXd> grad_svmp(const ModelSpec& spec, const ModelContext& ctx,
                                       const ParamState& state, const Dataset& data,
                                       Parametrization par) {
  if (spec.kind != ModelKind::SVMP) throw std::domain_error("grad_svmp: SVMP spec required");
  const int n = data.n();
  const int km1 = spec.K - 1;
  const auto z = svmp_centered_z(spec, ctx, state, par);
  Eigen::MatrixXd u(n, km1);
  Eigen::VectorXd zl(km1), dens(spec.K);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < km1; ++k) zl[k] = z[k][i];
    const Eigen::VectorXd lam = generalized_inverse_logit(zl);
    double p = 0.0;
    for (int k = 0; k < spec.K; ++k) {
      dens[k] = std::exp(vm_logpdf(data.directions[i], state.mean_angle[k], state.rho(k, 0)));
      p += lam[k] * dens[k];
    }
    for (int k = 0; k < km1; ++k) u(i, k) = data.weight(i) * lam[k] * (dens[k] - p) / p;
  }
  std::vector<Eigen::VectorXd> g(km1);
  for (int k = 0; k < km1; ++k) {
    if (par == Parametrization::Centered) {
      g[k] = u.col(k) - ctx.cov.solve(z[k] - ctx.mu_mix[k]);
    } else {
      g[k] = ctx.cov.chol.transpose() * u.col(k) - state.zmix[k];
    }
  }
  return g;
}

Eigen::VectorXd grad_svmp_two_component(const ModelSpec& spec, const ModelContext& ctx,
                                        const ParamState& state, const Dataset& data,
                                        Parametrization par) {
  if (spec.kind != ModelKind::SVMP || spec.K != 2)
    throw std::domain_error("grad_svmp_two_component: K = 2 SVMP spec required");
  const int n = data.n();
  const auto z = svmp_centered_z(spec, ctx, state, par);
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) {
    const double lam = 1.0 / (1.0 + std::exp(-z[0][i]));
    const double d1 = std::exp(vm_logpdf(data.directions[i], state.mean_angle[0], state.rho(0, 0)));
    const double d2 = std::exp(vm_logpdf(data.directions[i], state.mean_angle[1], state.rho(1, 0)));
    const double p = lam * d1 + (1.0 - lam) * d2;
    u[i] = data.weight(i) * lam * (1.0 - lam) * (d1 - d2) / p;
  }
  if (par == Parametrization::Centered) return u - ctx.cov.solve(z[0] - ctx.mu_mix[0]);
  return ctx.cov.chol.transpose() * u - state.zmix[0];
}

}  // namespace simplexdir

#include "simplexdir/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>

#include "simplexdir/bessel.hpp"
#include "simplexdir/em.hpp"

namespace simplexdir {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double vm_logpdf(double y, double m, double rho) {
  return rho * std::cos(y - m) - std::log(kTwoPi) - log_bessel_i0(rho);
}

// Fisher's approximation to the vM concentration MLE from the resultant.
double approx_concentration(double rbar) {
  double k;
  if (rbar < 0.53) {
    k = 2.0 * rbar + rbar * rbar * rbar + 5.0 / 6.0 * std::pow(rbar, 5);
  } else if (rbar < 0.85) {
    k = -0.4 + 1.39 * rbar + 0.43 / (1.0 - rbar);
  } else {
    k = 1.0 / (std::pow(rbar, 3) - 4.0 * rbar * rbar + 3.0 * rbar);
  }
  return std::clamp(k, 0.05, 50.0);
}

}  // namespace

// ---------------------------------------------------------------------
// Elliptical slice sampling (Murray, Adams & MacKay, Algorithm 2)

EssResult ess_step(const Eigen::VectorXd& f, double cur_loglik, const PriorDrawFn& prior_draw,
                   const LogLikFn& loglik, Rng& rng, const EssConfig& cfg) {
  if (!std::isfinite(cur_loglik))
    throw std::domain_error("ess_step: current log likelihood must be finite");
  const Eigen::VectorXd nu = prior_draw(rng);
  const double logy = cur_loglik + std::log(rng.uniform());
  double theta = rng.uniform(0.0, kTwoPi);
  double theta_min = theta - kTwoPi;
  double theta_max = theta;
  EssResult out;
  for (int it = 0; it < cfg.max_shrink_iters; ++it) {
    const Eigen::VectorXd fp = std::cos(theta) * f + std::sin(theta) * nu;
    const double ll = loglik(fp);
    ++out.n_proposals;
    if (ll > logy) {
      out.f = fp;
      out.loglik = ll;
      return out;
    }
    if (theta < 0.0) theta_min = theta;
    else theta_max = theta;
    theta = rng.uniform(theta_min, theta_max);
  }
  out.f = f;
  out.loglik = cur_loglik;
  out.exhausted = true;
  return out;
}

EssResult ess_step(const Eigen::VectorXd& f, const CovMatrix& prior_chol, const LogLikFn& loglik,
                   Rng& rng, const EssConfig& cfg) {
  auto draw = [&prior_chol](Rng& r) {
    Eigen::VectorXd xi(prior_chol.n());
    for (int i = 0; i < xi.size(); ++i) xi[i] = r.normal();
    return (prior_chol.chol * xi).eval();
  };
  return ess_step(f, loglik(f), draw, loglik, rng, cfg);
}

// ---------------------------------------------------------------------
// Hamiltonian Monte Carlo with the leapfrog integrator

LeapfrogResult leapfrog(const Eigen::VectorXd& q0, const Eigen::VectorXd& p0,
                        const PotentialFn& potential, double step_size, int steps,
                        const Eigen::VectorXd& mass_diag) {
  const int d = static_cast<int>(q0.size());
  const Eigen::VectorXd mass = mass_diag.size() ? mass_diag : Eigen::VectorXd::Ones(d);
  LeapfrogResult out;
  out.q = q0;
  out.p = p0;
  Eigen::VectorXd grad(d);
  double u = potential(out.q, &grad);
  if (!std::isfinite(u) || !grad.allFinite()) {
    out.divergent = true;
    return out;
  }
  out.p -= 0.5 * step_size * grad;
  for (int l = 0; l < steps; ++l) {
    out.q += step_size * (out.p.array() / mass.array()).matrix();
    u = potential(out.q, &grad);
    if (!std::isfinite(u) || !grad.allFinite()) {
      out.divergent = true;
      return out;
    }
    if (l + 1 < steps) out.p -= step_size * grad;
  }
  out.p -= 0.5 * step_size * grad;
  out.potential = u;
  return out;
}

HmcResult hmc_step(const Eigen::VectorXd& q0, const PotentialFn& potential, const HmcConfig& cfg,
                   Rng& rng) {
  const int d = static_cast<int>(q0.size());
  const Eigen::VectorXd mass = cfg.mass_diag.size() ? cfg.mass_diag : Eigen::VectorXd::Ones(d);
  Eigen::VectorXd p(d);
  for (int i = 0; i < d; ++i) p[i] = std::sqrt(mass[i]) * rng.normal();

  Eigen::VectorXd grad(d);
  const double u0 = potential(q0, &grad);
  const double k0 = 0.5 * (p.array().square() / mass.array()).sum();

  HmcResult out;
  out.q = q0;
  if (!std::isfinite(u0) || !grad.allFinite()) {
    out.divergent = true;
    return out;
  }
  const LeapfrogResult lf = leapfrog(q0, p, potential, cfg.step_size, cfg.leapfrog_steps,
                                     cfg.mass_diag);
  if (lf.divergent) {
    out.divergent = true;
    return out;
  }
  const double k1 = 0.5 * (lf.p.array().square() / mass.array()).sum();
  out.delta_h = (lf.potential + k1) - (u0 + k0);
  if (!std::isfinite(out.delta_h)) {
    out.divergent = true;
    return out;
  }
  if (std::log(rng.uniform()) < -out.delta_h) {
    out.q = lf.q;
    out.accepted = true;
  }
  return out;
}

DualAveraging::DualAveraging(double eps0, double target)
    : mu_(std::log(10.0 * eps0)), log_eps_(std::log(eps0)), target_(target) {}

void DualAveraging::update(double accept_prob) {
  static constexpr double kGamma = 0.05, kT0 = 10.0, kKappa = 0.75;
  ++t_;
  h_bar_ = (1.0 - 1.0 / (t_ + kT0)) * h_bar_ + (target_ - accept_prob) / (t_ + kT0);
  log_eps_ = mu_ - std::sqrt(static_cast<double>(t_)) / kGamma * h_bar_;
  const double w = std::pow(static_cast<double>(t_), -kKappa);
  log_eps_bar_ = w * log_eps_ + (1.0 - w) * log_eps_bar_;
}

namespace {

// Warmup plumbing shared by the fits: dual averaging plus a diagonal mass
// estimated from the middle warmup window.
class HmcAdapter {
 public:
  HmcAdapter(HmcConfig* cfg, int n_warmup, double eps0)
      : cfg_(cfg), n_warmup_(n_warmup), da_(eps0, cfg->target_accept) {
    cfg_->step_size = eps0;
    win_lo_ = n_warmup / 4;
    win_hi_ = (3 * n_warmup) / 4;
  }

  void observe(int t, const Eigen::VectorXd& q, double accept_prob) {
    if (!cfg_->adapt) return;
    if (t >= n_warmup_) {
      if (!finalized_) {
        cfg_->step_size = da_.finalized();
        finalized_ = true;
      }
      return;
    }
    da_.update(accept_prob);
    cfg_->step_size = da_.current();
    if (t >= win_lo_ && t < win_hi_) {
      if (sum_.size() == 0) {
        sum_ = Eigen::VectorXd::Zero(q.size());
        sum2_ = Eigen::VectorXd::Zero(q.size());
      }
      sum_ += q;
      sum2_ += q.array().square().matrix();
      ++count_;
    }
    if (t == win_hi_ && count_ > 10) {
      const Eigen::ArrayXd mean = sum_.array() / count_;
      Eigen::ArrayXd var = sum2_.array() / count_ - mean.square();
      var = var.max(1e-8);
      cfg_->mass_diag = (1.0 / var).matrix();
      da_ = DualAveraging(cfg_->step_size, cfg_->target_accept);
    }
  }

 private:
  HmcConfig* cfg_;
  int n_warmup_;
  DualAveraging da_;
  int win_lo_, win_hi_, count_ = 0;
  bool finalized_ = false;
  Eigen::VectorXd sum_, sum2_;
};

Eigen::VectorXd gp_prior_draw(const CovMatrix& cov, Rng& rng) {
  Eigen::VectorXd xi(cov.n());
  for (int i = 0; i < xi.size(); ++i) xi[i] = rng.normal();
  return cov.chol * xi;
}

}  // namespace

// ---------------------------------------------------------------------
// Independent models

Chain fit_iv(const Dataset& data, const ModelSpec& spec, const SamplerSettings& s,
             std::uint64_t chain_seed) {
  if (spec.kind != ModelKind::IV) throw std::domain_error("fit_iv: IV spec required");
  data.check();
  Rng rng(chain_seed);
  const auto summ = circular_summary(data.directions);
  Eigen::VectorXd q(2);
  q[0] = summ.mean.value() + 0.1 * rng.normal();
  q[1] = std::log(approx_concentration(summ.resultant_length)) + 0.1 * rng.normal();
  if (s.init) {
    q[0] = s.init->mean_angle[0];
    q[1] = s.init->phi[0][0];
  }
  const double a = spec.conc_prior.a, b = spec.conc_prior.b;
  const double u = spec.mean_prior.u, c = spec.mean_prior.c;
  PotentialFn pot = [&](const Eigen::VectorXd& qq, Eigen::VectorXd* grad) {
    const double m = qq[0], rho = std::exp(qq[1]);
    double lp = a * qq[1] - b * rho;
    if (c > 0.0) lp += c * std::cos(m - u);
    double dm = (c > 0.0) ? c * std::sin(u - m) : 0.0;
    double dphi = a - b * rho;
    const double a1 = bessel_i_ratio(1, rho);
    for (int i = 0; i < data.n(); ++i) {
      const double w = data.weight(i);
      lp += w * vm_logpdf(data.directions[i], m, rho);
      dm += w * rho * std::sin(data.directions[i] - m);
      dphi += w * rho * (std::cos(data.directions[i] - m) - a1);
    }
    (*grad)(0) = -dm;
    (*grad)(1) = -dphi;
    return -lp;
  };
  HmcConfig hmc = s.hmc;
  HmcAdapter adapter(&hmc, s.n_warmup, 0.1);
  Chain chain;
  chain.seed = chain_seed;
  chain.n_warmup = s.n_warmup;
  chain.thin = s.thin;
  double acc = 0.0;
  int n_steps = 0;
  for (int t = 0; t < s.n_iter; ++t) {
    HmcConfig step = hmc;
    step.step_size *= rng.uniform(0.9, 1.1);  // break periodic-orbit resonance
    const HmcResult r = hmc_step(q, pot, step, rng);
    q = r.q;
    const double ap = r.divergent ? 0.0 : std::min(1.0, std::exp(-r.delta_h));
    adapter.observe(t, q, ap);
    if (t >= s.n_warmup) {
      acc += r.accepted ? 1.0 : 0.0;
      ++n_steps;
      if ((t - s.n_warmup) % s.thin == 0) {
        ParamState st;
        st.mean_angle = {wrap_angle(q[0])};
        st.phi = {Eigen::VectorXd::Constant(1, q[1])};
        chain.draws.push_back(st);
        Eigen::VectorXd dummy(2);
        chain.loglik.push_back(-pot(q, &dummy));
      }
    }
  }
  chain.n_keep = static_cast<int>(chain.draws.size());
  chain.hmc_accept_rate = n_steps ? acc / n_steps : 1.0;
  return chain;
}

Chain fit_ivm(const Dataset& data, const ModelSpec& spec, const SamplerSettings& s,
              std::uint64_t chain_seed) {
  if (spec.kind != ModelKind::IVM) throw std::domain_error("fit_ivm: IVM spec required");
  data.check();
  const int n = data.n();
  const int K = spec.K;
  Rng rng(chain_seed);

  ParamState st;
  if (s.init) {
    st = *s.init;
  } else {
    EmConfig ec;
    ec.max_iters = 50;
    Rng em_rng = rng.substream(99);
    const auto em = em_ivm(data, K, ec, em_rng);
    st.mean_angle = em.m;
    st.lambda = em.lambda;
    st.phi.resize(K);
    for (int k = 0; k < K; ++k)
      st.phi[k] = Eigen::VectorXd::Constant(1, std::log(std::max(em.rho[k], 0.05)) + 0.05 * rng.normal());
  }
  st.zeta.assign(n, 0);

  const double a = spec.conc_prior.a, b = spec.conc_prior.b;
  const double u = spec.mean_prior.u, c = spec.mean_prior.c;
  std::vector<HmcConfig> hmc(K, s.hmc);
  std::vector<HmcAdapter> adapters;
  adapters.reserve(K);
  for (int k = 0; k < K; ++k) adapters.emplace_back(&hmc[k], s.n_warmup, 0.1);

  Chain chain;
  chain.seed = chain_seed;
  chain.n_warmup = s.n_warmup;
  chain.thin = s.thin;
  double acc = 0.0;
  int n_steps = 0;
  std::vector<double> probs(K);
  for (int t = 0; t < s.n_iter; ++t) {
    // labels
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < K; ++k)
        probs[k] = st.lambda[k] *
                   std::exp(vm_logpdf(data.directions[i], st.mean_angle[k], st.rho(k, 0)));
      st.zeta[i] = rng.categorical(probs);
    }
    // lambda | zeta ~ Dirichlet(1 + counts)
    Eigen::VectorXd g(K);
    std::vector<int> counts(K, 0);
    for (int i = 0; i < n; ++i) ++counts[st.zeta[i]];
    for (int k = 0; k < K; ++k) g[k] = rng.gamma(1.0 + counts[k], 1.0);
    st.lambda = g / g.sum();
    // per-component (m, phi) HMC
    for (int k = 0; k < K; ++k) {
      PotentialFn pot = [&, k](const Eigen::VectorXd& qq, Eigen::VectorXd* grad) {
        const double m = qq[0], rho = std::exp(qq[1]);
        double lp = a * qq[1] - b * rho;
        if (c > 0.0) lp += c * std::cos(m - u);
        double dm = (c > 0.0) ? c * std::sin(u - m) : 0.0;
        double dphi = a - b * rho;
        const double a1 = bessel_i_ratio(1, rho);
        for (int i = 0; i < n; ++i) {
          if (st.zeta[i] != k) continue;
          const double w = data.weight(i);
          lp += w * vm_logpdf(data.directions[i], m, rho);
          dm += w * rho * std::sin(data.directions[i] - m);
          dphi += w * rho * (std::cos(data.directions[i] - m) - a1);
        }
        (*grad)(0) = -dm;
        (*grad)(1) = -dphi;
        return -lp;
      };
      Eigen::VectorXd q(2);
      q[0] = st.mean_angle[k];
      q[1] = st.phi[k][0];
      HmcConfig step = hmc[k];
      step.step_size *= rng.uniform(0.9, 1.1);
      const HmcResult r = hmc_step(q, pot, step, rng);
      st.mean_angle[k] = wrap_angle(r.q[0]);
      st.phi[k][0] = r.q[1];
      const double ap = r.divergent ? 0.0 : std::min(1.0, std::exp(-r.delta_h));
      adapters[k].observe(t, r.q, ap);
      if (t >= s.n_warmup) {
        acc += r.accepted ? 1.0 : 0.0;
        ++n_steps;
      }
    }
    if (t >= s.n_warmup && (t - s.n_warmup) % s.thin == 0) {
      ParamState keep = st;
      chain.draws.push_back(keep);
      ModelContext ctx;  // IVM needs no GP context
      ParamState marg = st;
      marg.zeta.clear();
      chain.loglik.push_back(log_likelihood(spec, ctx, marg, data));
    }
  }
  chain.n_keep = static_cast<int>(chain.draws.size());
  chain.hmc_accept_rate = n_steps ? acc / n_steps : 1.0;
  return chain;
}

// ---------------------------------------------------------------------
// SVM: ESS on the centered latent pair, HMC on (phi, nu)

Chain fit_svm(const Dataset& data, const ModelSpec& spec, const SamplerSettings& s,
              std::uint64_t chain_seed) {
  if (spec.kind != ModelKind::SVM) throw std::domain_error("fit_svm: SVM spec required");
  const ModelContext ctx = prepare_context(spec, data);
  const int n = data.n();
  Rng rng(chain_seed);

  Eigen::VectorXd phi, f(2 * n);
  double nu;
  if (s.init) {
    phi = s.init->phi[0];
    nu = s.init->nu[0];
    f.head(n) = s.init->z1[0] - ctx.mu1[0];
    f.tail(n) = s.init->z2[0] - ctx.mu2[0];
  } else {
    const auto summ = circular_summary(data.directions);
    const double phi0 = std::log(approx_concentration(summ.resultant_length));
    nu = phi0 + 0.1 * rng.normal();
    phi = Eigen::VectorXd::Constant(n, nu);
    f.head(n) = 0.3 * gp_prior_draw(ctx.cov, rng);
    f.tail(n) = 0.3 * gp_prior_draw(ctx.cov, rng);
  }

  Eigen::VectorXd m(n);
  auto update_means = [&](const Eigen::VectorXd& ff) {
    for (int i = 0; i < n; ++i) {
      const double z1 = ff[i] + ctx.mu1[0][i];
      const double z2 = ff[n + i] + ctx.mu2[0][i];
      if (z1 * z1 + z2 * z2 < 1e-300) return false;
      m[i] = arctan_star(z1, z2);
    }
    return true;
  };
  if (!update_means(f)) throw std::runtime_error("fit_svm: degenerate initial latents");

  LogLikFn loglik = [&](const Eigen::VectorXd& ff) {
    double ll = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z1 = ff[i] + ctx.mu1[0][i];
      const double z2 = ff[n + i] + ctx.mu2[0][i];
      if (z1 * z1 + z2 * z2 < 1e-300) return kNegInf;
      const double mm = arctan_star(z1, z2);
      ll += data.weight(i) * vm_logpdf(data.directions[i], mm, std::exp(phi[i]));
    }
    return ll;
  };
  PriorDrawFn prior_draw = [&](Rng& r) {
    Eigen::VectorXd out(2 * n);
    out.head(n) = gp_prior_draw(ctx.cov, r);
    out.tail(n) = gp_prior_draw(ctx.cov, r);
    return out;
  };
  const double varsig = spec.conc_prior.varsigma, tau = spec.conc_prior.tau;
  // non-centered block coordinates: phi = nu + varsigma * eta
  PotentialFn pot = [&](const Eigen::VectorXd& q, Eigen::VectorXd* grad) {
    const double nv = q[n];
    double lp = -0.5 * nv * nv / (tau * tau);
    double dnu = -nv / (tau * tau);
    for (int i = 0; i < n; ++i) {
      const double rho = std::exp(nv + varsig * q[i]);
      const double w = data.weight(i);
      lp += w * vm_logpdf(data.directions[i], m[i], rho) - 0.5 * q[i] * q[i];
      const double dphi =
          w * rho * (std::cos(data.directions[i] - m[i]) - bessel_i_ratio(1, rho));
      (*grad)(i) = -(dphi * varsig - q[i]);
      dnu += dphi;
    }
    (*grad)(n) = -dnu;
    return -lp;
  };

  HmcConfig hmc = s.hmc;
  HmcAdapter adapter(&hmc, s.n_warmup, 0.02);
  Chain chain;
  chain.seed = chain_seed;
  chain.n_warmup = s.n_warmup;
  chain.thin = s.thin;
  double cur_ll = loglik(f);
  double acc = 0.0;
  int n_steps = 0;
  for (int t = 0; t < s.n_iter; ++t) {
    for (int sweep = 0; sweep < s.ess_sweeps; ++sweep) {
      const EssResult er = ess_step(f, cur_ll, prior_draw, loglik, rng, s.ess);
      f = er.f;
      cur_ll = er.loglik;
      if (er.exhausted) ++chain.ess_exhausted;
    }
    update_means(f);

    Eigen::VectorXd q(n + 1);
    q.head(n) = (phi - Eigen::VectorXd::Constant(n, nu)) / varsig;
    q[n] = nu;
    HmcConfig step = hmc;
    step.step_size *= rng.uniform(0.9, 1.1);
    const HmcResult hr = hmc_step(q, pot, step, rng);
    nu = hr.q[n];
    phi = Eigen::VectorXd::Constant(n, nu) + varsig * hr.q.head(n);
    cur_ll = loglik(f);  // phi changed
    const double ap = hr.divergent ? 0.0 : std::min(1.0, std::exp(-hr.delta_h));
    adapter.observe(t, hr.q, ap);
    if (t >= s.n_warmup) {
      acc += hr.accepted ? 1.0 : 0.0;
      ++n_steps;
      if ((t - s.n_warmup) % s.thin == 0) {
        ParamState st;
        st.z1 = {f.head(n) + ctx.mu1[0]};
        st.z2 = {f.tail(n) + ctx.mu2[0]};
        st.phi = {phi};
        st.nu = {nu};
        chain.draws.push_back(std::move(st));
        chain.loglik.push_back(cur_ll);
      }
    }
  }
  chain.n_keep = static_cast<int>(chain.draws.size());
  chain.hmc_accept_rate = n_steps ? acc / n_steps : 1.0;
  return chain;
}

// ---------------------------------------------------------------------
// SVM-c: label Gibbs, per-component ESS, per-component HMC on (phi_k, nu_k)

Chain fit_svmc(const Dataset& data, const ModelSpec& spec, const SamplerSettings& s,
               std::uint64_t chain_seed) {
  if (spec.kind != ModelKind::SVMC) throw std::domain_error("fit_svmc: SVMC spec required");
  const ModelContext ctx = prepare_context(spec, data);
  const int n = data.n();
  const int K = spec.K;
  Rng rng(chain_seed);

  std::vector<Eigen::VectorXd> f1(K), f2(K), phi(K);
  std::vector<double> nu(K);
  Eigen::VectorXd lambda = Eigen::VectorXd::Constant(K, 1.0 / K);
  std::vector<int> zeta(n, 0);
  if (s.init) {
    for (int k = 0; k < K; ++k) {
      f1[k] = s.init->z1[k] - ctx.mu1[k];
      f2[k] = s.init->z2[k] - ctx.mu2[k];
      phi[k] = s.init->phi[k];
      nu[k] = s.init->nu[k];
    }
    lambda = s.init->lambda;
    if (!s.init->zeta.empty()) zeta = s.init->zeta;
  } else {
    EmConfig ec;
    ec.max_iters = 60;
    Rng em_rng = rng.substream(99);
    const auto em = em_ivm(data, K, ec, em_rng);
    for (int k = 0; k < K; ++k) {
      const double p0 = std::log(std::max(em.rho[k], 0.05));
      nu[k] = p0 + 0.1 * rng.normal();
      phi[k] = Eigen::VectorXd::Constant(n, nu[k]);
      f1[k] = 0.3 * gp_prior_draw(ctx.cov, rng);
      f2[k] = 0.3 * gp_prior_draw(ctx.cov, rng);
    }
    lambda = em.lambda;
  }

  std::vector<Eigen::VectorXd> m(K, Eigen::VectorXd(n));
  auto update_means = [&](int k) {
    for (int i = 0; i < n; ++i) {
      const double z1 = f1[k][i] + ctx.mu1[k][i];
      const double z2 = f2[k][i] + ctx.mu2[k][i];
      m[k][i] = arctan_star(z1, z2);
    }
  };
  for (int k = 0; k < K; ++k) update_means(k);

  PriorDrawFn prior_draw = [&](Rng& r) {
    Eigen::VectorXd out(2 * n);
    out.head(n) = gp_prior_draw(ctx.cov, r);
    out.tail(n) = gp_prior_draw(ctx.cov, r);
    return out;
  };
  const double varsig = spec.conc_prior.varsigma, tau = spec.conc_prior.tau;

  std::vector<HmcConfig> hmc(K, s.hmc);
  std::vector<HmcAdapter> adapters;
  adapters.reserve(K);
  for (int k = 0; k < K; ++k) adapters.emplace_back(&hmc[k], s.n_warmup, 0.02);

  Chain chain;
  chain.seed = chain_seed;
  chain.n_warmup = s.n_warmup;
  chain.thin = s.thin;
  double acc = 0.0;
  int n_steps = 0;
  std::vector<double> probs(K);
  for (int t = 0; t < s.n_iter; ++t) {
    // labels given everything else
    for (int i = 0; i < n; ++i) {
      double tot = 0.0;
      for (int k = 0; k < K; ++k) {
        probs[k] = lambda[k] * std::exp(vm_logpdf(data.directions[i], m[k][i], std::exp(phi[k][i])));
        tot += probs[k];
      }
      for (int k = 0; k < K; ++k) probs[k] /= tot;
      zeta[i] = rng.categorical(probs);
    }
    // lambda | zeta
    Eigen::VectorXd g(K);
    std::vector<int> counts(K, 0);
    for (int i = 0; i < n; ++i) ++counts[zeta[i]];
    for (int k = 0; k < K; ++k) g[k] = rng.gamma(1.0 + counts[k], 1.0);
    lambda = g / g.sum();

    for (int k = 0; k < K; ++k) {
      // ESS on the centered latent pair; only this component's points enter
      // the likelihood but all locations are proposed.
      LogLikFn loglik = [&, k](const Eigen::VectorXd& ff) {
        double ll = 0.0;
        for (int i = 0; i < n; ++i) {
          if (zeta[i] != k) continue;
          const double z1 = ff[i] + ctx.mu1[k][i];
          const double z2 = ff[n + i] + ctx.mu2[k][i];
          if (z1 * z1 + z2 * z2 < 1e-300) return kNegInf;
          const double mm = arctan_star(z1, z2);
          ll += data.weight(i) * vm_logpdf(data.directions[i], mm, std::exp(phi[k][i]));
        }
        return ll;
      };
      Eigen::VectorXd fk(2 * n);
      fk.head(n) = f1[k];
      fk.tail(n) = f2[k];
      double ll = loglik(fk);
      for (int sweep = 0; sweep < s.ess_sweeps; ++sweep) {
        const EssResult er = ess_step(fk, ll, prior_draw, loglik, rng, s.ess);
        if (er.exhausted) ++chain.ess_exhausted;
        fk = er.f;
        ll = er.loglik;
      }
      f1[k] = fk.head(n);
      f2[k] = fk.tail(n);
      update_means(k);

      // (phi_k, nu_k) block, non-centered: phi = nu + varsigma * eta
      PotentialFn pot = [&, k](const Eigen::VectorXd& q, Eigen::VectorXd* grad) {
        const double nv = q[n];
        double lp = -0.5 * nv * nv / (tau * tau);
        double dnu = -nv / (tau * tau);
        for (int i = 0; i < n; ++i) {
          const double rho = std::exp(nv + varsig * q[i]);
          double dphi = 0.0;
          if (zeta[i] == k) {
            const double w = data.weight(i);
            lp += w * vm_logpdf(data.directions[i], m[k][i], rho);
            dphi = w * rho * (std::cos(data.directions[i] - m[k][i]) - bessel_i_ratio(1, rho));
          }
          lp += -0.5 * q[i] * q[i];
          (*grad)(i) = -(dphi * varsig - q[i]);
          dnu += dphi;
        }
        (*grad)(n) = -dnu;
        return -lp;
      };
      Eigen::VectorXd q(n + 1);
      q.head(n) = (phi[k] - Eigen::VectorXd::Constant(n, nu[k])) / varsig;
      q[n] = nu[k];
      HmcConfig step = hmc[k];
      step.step_size *= rng.uniform(0.9, 1.1);
      const HmcResult hr = hmc_step(q, pot, step, rng);
      nu[k] = hr.q[n];
      phi[k] = Eigen::VectorXd::Constant(n, nu[k]) + varsig * hr.q.head(n);
      const double ap = hr.divergent ? 0.0 : std::min(1.0, std::exp(-hr.delta_h));
      adapters[k].observe(t, hr.q, ap);
      if (t >= s.n_warmup) {
        acc += hr.accepted ? 1.0 : 0.0;
        ++n_steps;
      }
    }

    if (t >= s.n_warmup && (t - s.n_warmup) % s.thin == 0) {
      ParamState st;
      st.z1.resize(K);
      st.z2.resize(K);
      st.phi = phi;
      st.nu = nu;
      st.lambda = lambda;
      st.zeta = zeta;
      for (int k = 0; k < K; ++k) {
        st.z1[k] = f1[k] + ctx.mu1[k];
        st.z2[k] = f2[k] + ctx.mu2[k];
      }
      ParamState marg = st;
      marg.zeta.clear();
      chain.loglik.push_back(log_likelihood(spec, ctx, marg, data));
      chain.draws.push_back(std::move(st));
    }
  }
  chain.n_keep = static_cast<int>(chain.draws.size());
  chain.hmc_accept_rate = n_steps ? acc / n_steps : 1.0;
  return chain;
}

// ---------------------------------------------------------------------
// SVM-p: joint HMC over (z~, m, log rho) in the non-centered parametrization

Chain fit_svmp(const Dataset& data, const ModelSpec& spec, const SamplerSettings& s,
               std::uint64_t chain_seed) {
  if (spec.kind != ModelKind::SVMP) throw std::domain_error("fit_svmp: SVMP spec required");
  const ModelContext ctx = prepare_context(spec, data);
  const int n = data.n();
  const int K = spec.K;
  const int km1 = K - 1;
  const int dim = n * km1 + 2 * K;
  Rng rng(chain_seed);

  Eigen::VectorXd q = Eigen::VectorXd::Zero(dim);
  if (s.init) {
    // init carries centered mixing latents; whiten them
    for (int k = 0; k < km1; ++k)
      q.segment(k * n, n) =
          ctx.cov.chol.triangularView<Eigen::Lower>().solve(s.init->zmix[k] - ctx.mu_mix[k]);
    for (int k = 0; k < K; ++k) {
      q[n * km1 + k] = s.init->mean_angle[k];
      q[n * km1 + K + k] = s.init->phi[k][0];
    }
  } else {
    EmConfig ec;
    ec.max_iters = 60;
    Rng em_rng = rng.substream(99);
    const auto em = em_ivm(data, K, ec, em_rng);
    for (int k = 0; k < K; ++k) {
      q[n * km1 + k] = em.m[k] + 0.05 * rng.normal();
      q[n * km1 + K + k] = std::log(std::max(em.rho[k], 0.05)) + 0.05 * rng.normal();
    }
    for (int k = 0; k < km1; ++k)
      for (int i = 0; i < n; ++i) q[k * n + i] = 0.1 * rng.normal();
  }

  PotentialFn pot = [&](const Eigen::VectorXd& qq, Eigen::VectorXd* grad) {
    grad->setZero();
    // unpack
    ParamState st;
    st.zmix.resize(km1);
    for (int k = 0; k < km1; ++k) st.zmix[k] = qq.segment(k * n, n);
    st.mean_angle.resize(K);
    st.phi.resize(K);
    double lp = 0.0;
    for (int k = 0; k < K; ++k) {
      st.mean_angle[k] = qq[n * km1 + k];
      const double ph = qq[n * km1 + K + k];
      st.phi[k] = Eigen::VectorXd::Constant(1, ph);
      lp += ph - std::exp(ph);  // Gamma(1,1) in phi; uniform mean prior constant
    }
    // centered z for the likelihood
    std::vector<Eigen::VectorXd> z(km1);
    for (int k = 0; k < km1; ++k) {
      z[k] = ctx.cov.chol * st.zmix[k] + ctx.mu_mix[k];
      lp += -0.5 * st.zmix[k].squaredNorm();
    }
    Eigen::VectorXd zl(km1), dens(K);
    Eigen::MatrixXd u(n, km1);
    std::vector<double> dm(K, 0.0), dphi(K, 0.0), a1(K);
    for (int k = 0; k < K; ++k) a1[k] = bessel_i_ratio(1, std::exp(st.phi[k][0]));
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < km1; ++k) zl[k] = z[k][i];
      const Eigen::VectorXd lam = generalized_inverse_logit(zl);
      double p = 0.0;
      for (int k = 0; k < K; ++k) {
        dens[k] = std::exp(vm_logpdf(data.directions[i], st.mean_angle[k], std::exp(st.phi[k][0])));
        p += lam[k] * dens[k];
      }
      const double w = data.weight(i);
      lp += w * std::log(p);
      for (int k = 0; k < km1; ++k) u(i, k) = w * lam[k] * (dens[k] - p) / p;
      for (int k = 0; k < K; ++k) {
        const double rho = std::exp(st.phi[k][0]);
        const double resp = lam[k] * dens[k] / p;
        dm[k] += w * resp * rho * std::sin(data.directions[i] - st.mean_angle[k]);
        dphi[k] += w * resp * rho * (std::cos(data.directions[i] - st.mean_angle[k]) - a1[k]);
      }
    }
    for (int k = 0; k < km1; ++k)
      grad->segment(k * n, n) = -(ctx.cov.chol.transpose() * u.col(k) - st.zmix[k]);
    for (int k = 0; k < K; ++k) {
      (*grad)(n * km1 + k) = -dm[k];
      (*grad)(n * km1 + K + k) = -(dphi[k] + 1.0 - std::exp(st.phi[k][0]));
    }
    return -lp;
  };

  HmcConfig hmc = s.hmc;
  HmcAdapter adapter(&hmc, s.n_warmup, 0.02);
  Chain chain;
  chain.seed = chain_seed;
  chain.n_warmup = s.n_warmup;
  chain.thin = s.thin;
  double acc = 0.0;
  int n_steps = 0;
  Eigen::VectorXd gtmp(dim);
  for (int t = 0; t < s.n_iter; ++t) {
    HmcConfig step = hmc;
    step.step_size *= rng.uniform(0.9, 1.1);
    const HmcResult hr = hmc_step(q, pot, step, rng);
    q = hr.q;
    const double ap = hr.divergent ? 0.0 : std::min(1.0, std::exp(-hr.delta_h));
    adapter.observe(t, q, ap);
    if (t >= s.n_warmup) {
      acc += hr.accepted ? 1.0 : 0.0;
      ++n_steps;
      if ((t - s.n_warmup) % s.thin == 0) {
        ParamState st;
        st.zmix.resize(km1);
        for (int k = 0; k < km1; ++k)
          st.zmix[k] = ctx.cov.chol * q.segment(k * n, n) + ctx.mu_mix[k];
        st.mean_angle.resize(K);
        st.phi.resize(K);
        for (int k = 0; k < K; ++k) {
          st.mean_angle[k] = wrap_angle(q[n * km1 + k]);
          st.phi[k] = Eigen::VectorXd::Constant(1, q[n * km1 + K + k]);
        }
        chain.loglik.push_back(log_likelihood(spec, ctx, st, data));
        chain.draws.push_back(std::move(st));
      }
    }
  }
  chain.n_keep = static_cast<int>(chain.draws.size());
  chain.hmc_accept_rate = n_steps ? acc / n_steps : 1.0;
  return chain;
}

std::vector<Chain> run_chains(const Dataset& data, const ModelSpec& spec,
                              const SamplerSettings& s) {
  Rng root(s.seed);
  std::vector<std::uint64_t> seeds(s.n_chains);
  for (int c = 0; c < s.n_chains; ++c) seeds[c] = root.substream(c + 1).root_seed();
  auto fit_one = [&](int c) {
    switch (spec.kind) {
      case ModelKind::IV: return fit_iv(data, spec, s, seeds[c]);
      case ModelKind::IVM: return fit_ivm(data, spec, s, seeds[c]);
      case ModelKind::SVM: return fit_svm(data, spec, s, seeds[c]);
      case ModelKind::SVMC: return fit_svmc(data, spec, s, seeds[c]);
      case ModelKind::SVMP: return fit_svmp(data, spec, s, seeds[c]);
    }
    throw std::logic_error("run_chains: unknown kind");
  };
  std::vector<Chain> out(s.n_chains);
  if (s.threads > 1) {
    std::vector<std::future<Chain>> futs;
    futs.reserve(s.n_chains);
    for (int c = 0; c < s.n_chains; ++c)
      futs.push_back(std::async(std::launch::async, fit_one, c));
    for (int c = 0; c < s.n_chains; ++c) out[c] = futs[c].get();
  } else {
    for (int c = 0; c < s.n_chains; ++c) out[c] = fit_one(c);
  }
  return out;
}

// ---------------------------------------------------------------------
// Diagnostics

double split_rhat(const std::vector<std::vector<double>>& per_chain) {
  std::vector<std::vector<double>> halves;
  for (const auto& c : per_chain) {
    const std::size_t h = c.size() / 2;
    if (h < 2) return 1.0;
    halves.emplace_back(c.begin(), c.begin() + h);
    halves.emplace_back(c.begin() + h, c.begin() + 2 * h);
  }
  const std::size_t m = halves.size();
  const std::size_t n = halves[0].size();
  std::vector<double> means(m), vars(m);
  for (std::size_t j = 0; j < m; ++j) {
    double mu = 0.0;
    for (double x : halves[j]) mu += x;
    mu /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : halves[j]) ss += (x - mu) * (x - mu);
    means[j] = mu;
    vars[j] = ss / static_cast<double>(n - 1);
  }
  double grand = 0.0;
  for (double mu : means) grand += mu;
  grand /= static_cast<double>(m);
  double b = 0.0;
  for (double mu : means) b += (mu - grand) * (mu - grand);
  b *= static_cast<double>(n) / static_cast<double>(m - 1);
  double w = 0.0;
  for (double v : vars) w += v;
  w /= static_cast<double>(m);
  if (w <= 1e-300) return 1.0;
  const double var_plus = (static_cast<double>(n - 1) / n) * w + b / static_cast<double>(n);
  return std::sqrt(var_plus / w);
}

double effective_sample_size(const std::vector<std::vector<double>>& per_chain) {
  const std::size_t m = per_chain.size();
  std::size_t n = per_chain[0].size();
  for (const auto& c : per_chain) n = std::min(n, c.size());
  if (n < 4) return static_cast<double>(n * m);
  std::vector<double> means(m), vars(m);
  for (std::size_t j = 0; j < m; ++j) {
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += per_chain[j][i];
    mu /= static_cast<double>(n);
    means[j] = mu;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) ss += (per_chain[j][i] - mu) * (per_chain[j][i] - mu);
    vars[j] = ss / static_cast<double>(n - 1);
  }
  double w = 0.0;
  for (double v : vars) w += v;
  w /= static_cast<double>(m);
  double var_plus = (static_cast<double>(n - 1) / n) * w;
  if (m > 1) {
    double grand = 0.0;
    for (double mu : means) grand += mu;
    grand /= static_cast<double>(m);
    double b = 0.0;
    for (double mu : means) b += (mu - grand) * (mu - grand);
    b /= static_cast<double>(m - 1);
    var_plus += b;
  }
  if (var_plus <= 1e-300) return static_cast<double>(n * m);
  // combined autocorrelation, Geyer initial monotone sequence on paired sums
  double tau = 1.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t t = 1; t + 1 < n; t += 2) {
    double rho_t = 0.0, rho_t1 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double a0 = 0.0, a1 = 0.0;
      for (std::size_t i = 0; i + t < n; ++i)
        a0 += (per_chain[j][i] - means[j]) * (per_chain[j][i + t] - means[j]);
      for (std::size_t i = 0; i + t + 1 < n; ++i)
        a1 += (per_chain[j][i] - means[j]) * (per_chain[j][i + t + 1] - means[j]);
      rho_t += a0 / static_cast<double>(n);
      rho_t1 += a1 / static_cast<double>(n);
    }
    rho_t = 1.0 - (w - rho_t / static_cast<double>(m)) / var_plus;
    rho_t1 = 1.0 - (w - rho_t1 / static_cast<double>(m)) / var_plus;
    double pair = rho_t + rho_t1;
    if (pair < 0.0) break;
    pair = std::min(pair, prev_pair);
    prev_pair = pair;
    tau += 2.0 * pair;
    if (t > 200) break;
  }
  return static_cast<double>(n * m) / tau;
}

std::map<std::string, double> state_functionals(const ModelSpec& spec, const ParamState& st) {
  std::map<std::string, double> f;
  switch (spec.kind) {
    case ModelKind::IV:
      f["m_cos"] = std::cos(st.mean_angle[0]);
      f["m_sin"] = std::sin(st.mean_angle[0]);
      f["phi"] = st.phi[0][0];
      break;
    case ModelKind::IVM:
      for (int k = 0; k < spec.K; ++k) {
        const std::string suf = "_" + std::to_string(k + 1);
        f["lambda" + suf] = st.lambda[k];
        f["phi" + suf] = st.phi[k][0];
        f["m_cos" + suf] = std::cos(st.mean_angle[k]);
        f["m_sin" + suf] = std::sin(st.mean_angle[k]);
      }
      break;
    case ModelKind::SVM: {
      f["nu"] = st.nu[0];
      f["phi_bar"] = st.phi[0].mean();
      const Eigen::VectorXd m = latent_mean_angles(st.z1[0], st.z2[0]);
      f["m_cos_bar"] = m.array().cos().mean();
      f["m_sin_bar"] = m.array().sin().mean();
      break;
    }
    case ModelKind::SVMC:
      for (int k = 0; k < spec.K; ++k) {
        const std::string suf = "_" + std::to_string(k + 1);
        f["nu" + suf] = st.nu[k];
        f["lambda" + suf] = st.lambda[k];
        f["phi_bar" + suf] = st.phi[k].mean();
        const Eigen::VectorXd m = latent_mean_angles(st.z1[k], st.z2[k]);
        f["m_cos_bar" + suf] = m.array().cos().mean();
        f["m_sin_bar" + suf] = m.array().sin().mean();
      }
      break;
    case ModelKind::SVMP: {
      for (int k = 0; k < spec.K; ++k) {
        const std::string suf = "_" + std::to_string(k + 1);
        f["m_cos" + suf] = std::cos(st.mean_angle[k]);
        f["m_sin" + suf] = std::sin(st.mean_angle[k]);
        f["phi" + suf] = st.phi[k][0];
      }
      // location-averaged first-component probability
      double lam1 = 0.0;
      const int n = static_cast<int>(st.zmix[0].size());
      Eigen::VectorXd zl(spec.K - 1);
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k + 1 < spec.K; ++k) zl[k] = st.zmix[k][i];
        lam1 += generalized_inverse_logit(zl)[0];
      }
      f["lambda1_bar"] = lam1 / n;
      break;
    }
  }
  return f;
}

std::map<std::string, ScalarDiag> chain_diagnostics(const ModelSpec& spec,
                                                    const std::vector<Chain>& chains) {
  std::map<std::string, std::vector<std::vector<double>>> series;
  for (const auto& chain : chains) {
    std::map<std::string, std::vector<double>> per;
    for (const auto& st : chain.draws)
      for (const auto& [k, v] : state_functionals(spec, st)) per[k].push_back(v);
    for (auto& [k, v] : per) series[k].push_back(std::move(v));
  }
  std::map<std::string, ScalarDiag> out;
  for (auto& [k, v] : series) {
    ScalarDiag d;
    d.rhat = split_rhat(v);
    d.ess = effective_sample_size(v);
    out[k] = d;
  }
  return out;
}

}  // namespace simplexdir

#include "simplexdir/em.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "simplexdir/bessel.hpp"

namespace simplexdir {

namespace {

double vm_logpdf(double y, double m, double rho) {
  return rho * std::cos(y - m) - std::log(kTwoPi) - log_bessel_i0(rho);
}

// k-means on the embedded circle, used to seed responsibilities.
std::vector<int> circle_kmeans(const Eigen::VectorXd& y, int K, Rng& rng) {
  const int n = static_cast<int>(y.size());
  std::vector<double> centers(K);
  centers[0] = y[static_cast<int>(rng.uniform() * n) % n];
  for (int k = 1; k < K; ++k) {
    // farthest-point style seeding with random tie-breaking
    double best = -1.0;
    int pick = 0;
    for (int trial = 0; trial < 8; ++trial) {
      const int i = static_cast<int>(rng.uniform() * n) % n;
      double d = kTwoPi;
      for (int j = 0; j < k; ++j) d = std::min(d, circular_distance(y[i], centers[j]));
      if (d > best) {
        best = d;
        pick = i;
      }
    }
    centers[k] = y[pick];
  }
  std::vector<int> assign(n, 0);
  for (int it = 0; it < 10; ++it) {
    for (int i = 0; i < n; ++i) {
      double d = kTwoPi + 1.0;
      for (int k = 0; k < K; ++k) {
        const double dk = circular_distance(y[i], centers[k]);
        if (dk < d) {
          d = dk;
          assign[i] = k;
        }
      }
    }
    for (int k = 0; k < K; ++k) {
      double c = 0.0, s = 0.0;
      int cnt = 0;
      for (int i = 0; i < n; ++i) {
        if (assign[i] != k) continue;
        c += std::cos(y[i]);
        s += std::sin(y[i]);
        ++cnt;
      }
      if (cnt > 0 && (c != 0.0 || s != 0.0)) centers[k] = arctan_star(c, s);
    }
  }
  return assign;
}

struct ClusterInit {
  Eigen::VectorXd lambda;
  std::vector<double> m;
  Eigen::VectorXd rho;
};

double approx_concentration(double rbar) {
  double k;
  if (rbar < 0.53) k = 2.0 * rbar + std::pow(rbar, 3) + 5.0 / 6.0 * std::pow(rbar, 5);
  else if (rbar < 0.85) k = -0.4 + 1.39 * rbar + 0.43 / (1.0 - rbar);
  else k = 1.0 / (std::pow(rbar, 3) - 4.0 * rbar * rbar + 3.0 * rbar);
  return std::clamp(k, 0.05, 50.0);
}

ClusterInit cluster_init(const Dataset& data, int K, Rng& rng) {
  const auto assign = circle_kmeans(data.directions, K, rng);
  const int n = data.n();
  ClusterInit out;
  out.lambda.resize(K);
  out.m.resize(K);
  out.rho.resize(K);
  for (int k = 0; k < K; ++k) {
    double c = 0.0, s = 0.0;
    int cnt = 0;
    for (int i = 0; i < n; ++i) {
      if (assign[i] != k) continue;
      c += std::cos(data.directions[i]);
      s += std::sin(data.directions[i]);
      ++cnt;
    }
    out.lambda[k] = std::max(1, cnt) / static_cast<double>(n);
    if (cnt > 0 && (c != 0.0 || s != 0.0)) {
      out.m[k] = arctan_star(c, s);
      out.rho[k] = approx_concentration(std::hypot(c, s) / cnt);
    } else {
      out.m[k] = rng.uniform(0.0, kTwoPi);
      out.rho[k] = 1.0;
    }
  }
  out.lambda /= out.lambda.sum();
  return out;
}

// Gradient ascent on a block with step halving; accepts only objective
// increases, so every M step is a generalized (monotone) M step.
template <typename Vec, typename ObjFn, typename GradFn>
void ascend(Vec& theta, const ObjFn& objective, const GradFn& gradient, int inner_iters,
            double step0) {
  double cur = objective(theta);
  double step = step0;
  for (int it = 0; it < inner_iters; ++it) {
    const Vec g = gradient(theta);
    bool moved = false;
    while (step > 1e-12) {
      Vec trial = theta + step * g;
      const double val = objective(trial);
      if (std::isfinite(val) && val >= cur) {
        theta = trial;
        cur = val;
        moved = true;
        step *= 1.5;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
}

template <typename T>
std::vector<std::size_t> sorted_order(const std::vector<T>& key) {
  std::vector<std::size_t> idx(key.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
  return idx;
}

}  // namespace

// ---------------------------------------------------------------------

EmIvmResult em_ivm(const Dataset& data, int K, const EmConfig& cfg, Rng& rng) {
  data.check();
  if (data.n() == 0) throw std::domain_error("em_ivm: empty data");
  if (K < 1) throw std::domain_error("em_ivm: K must be >= 1");
  const int n = data.n();
  const Eigen::VectorXd& y = data.directions;

  ClusterInit init = cluster_init(data, K, rng);
  Eigen::VectorXd lambda = init.lambda;
  std::vector<double> m = init.m;
  Eigen::VectorXd rho = init.rho;

  EmIvmResult out;
  out.resp.r.resize(K, n);
  auto objective = [&]() {
    double j = 0.0;
    for (int i = 0; i < n; ++i) {
      double p = 0.0;
      for (int k = 0; k < K; ++k) p += lambda[k] * std::exp(vm_logpdf(y[i], m[k], rho[k]));
      j += data.weight(i) * std::log(p);
    }
    return j;  // flat priors: u uniform, rho improper flat
  };

  double prev = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    // E step
    for (int i = 0; i < n; ++i) {
      double tot = 0.0;
      for (int k = 0; k < K; ++k) {
        out.resp.r(k, i) = lambda[k] * std::exp(vm_logpdf(y[i], m[k], rho[k]));
        tot += out.resp.r(k, i);
      }
      out.resp.r.col(i) /= tot;
    }
    const double j = objective();
    out.trace.push_back(j);
    if (std::abs(j - prev) < cfg.tol) {
      out.converged = true;
      break;
    }
    prev = j;
    // M step
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) wsum += data.weight(i);
    for (int k = 0; k < K; ++k) {
      double lw = 0.0, c = 0.0, s = 0.0;
      for (int i = 0; i < n; ++i) {
        const double rw = out.resp.r(k, i) * data.weight(i);
        lw += rw;
        c += rw * std::cos(y[i]);
        s += rw * std::sin(y[i]);
      }
      lambda[k] = lw / wsum;
      if (c != 0.0 || s != 0.0) m[k] = arctan_star(c, s);
      // concentration by monotone gradient ascent
      double r0 = rho[k];
      auto obj_rho = [&](double rr) {
        if (rr <= 0.0) return -std::numeric_limits<double>::infinity();
        double q = 0.0;
        for (int i = 0; i < n; ++i)
          q += out.resp.r(k, i) * data.weight(i) * vm_logpdf(y[i], m[k], rr);
        return q;
      };
      auto grad_rho = [&](double rr) {
        const double a1 = bessel_i_ratio(1, rr);
        double g = 0.0;
        for (int i = 0; i < n; ++i)
          g += out.resp.r(k, i) * data.weight(i) * (std::cos(y[i] - m[k]) - a1);
        return g;
      };
      ascend(r0, obj_rho, grad_rho, cfg.inner_iters, cfg.step0);
      rho[k] = r0;
    }
  }
  // report components sorted by mean direction
  const auto order = sorted_order(m);
  EmIvmResult sorted = out;
  sorted.lambda.resize(K);
  sorted.m.resize(K);
  sorted.rho.resize(K);
  for (int k = 0; k < K; ++k) {
    sorted.lambda[k] = lambda[order[k]];
    sorted.m[k] = m[order[k]];
    sorted.rho[k] = rho[order[k]];
    sorted.resp.r.row(k) = out.resp.r.row(order[k]);
  }
  sorted.trace = out.trace;
  sorted.converged = out.converged;
  return sorted;
}

// ---------------------------------------------------------------------

EmSvmcResult em_svmc(const Dataset& data, const ModelSpec& spec, const EmConfig& cfg, Rng& rng) {
  if (spec.kind != ModelKind::SVMC) throw std::domain_error("em_svmc: SVMC spec required");
  const ModelContext ctx = prepare_context(spec, data);
  const int n = data.n();
  const int K = spec.K;
  const double varsig = spec.conc_prior.varsigma, tau = spec.conc_prior.tau;
  const Eigen::VectorXd& y = data.directions;
  const Eigen::MatrixXd& L = ctx.cov.chol;

  ClusterInit init = cluster_init(data, K, rng);
  EmSvmcResult out;
  out.lambda = init.lambda;
  out.zt1.assign(K, Eigen::VectorXd::Zero(n));
  out.zt2.assign(K, Eigen::VectorXd::Zero(n));
  out.phi.resize(K);
  out.nu.resize(K);
  for (int k = 0; k < K; ++k) {
    out.nu[k] = std::log(std::max(init.rho[k], 0.05));
    out.phi[k] = Eigen::VectorXd::Constant(n, out.nu[k]);
  }
  out.resp.r.resize(K, n);

  auto mean_field = [&](int k) {
    const Eigen::VectorXd z1 = L * out.zt1[k] + ctx.mu1[k];
    const Eigen::VectorXd z2 = L * out.zt2[k] + ctx.mu2[k];
    return latent_mean_angles(z1, z2);
  };
  std::vector<Eigen::VectorXd> m(K);
  for (int k = 0; k < K; ++k) m[k] = mean_field(k);

  auto objective = [&]() {
    double j = 0.0;
    for (int i = 0; i < n; ++i) {
      double p = 0.0;
      for (int k = 0; k < K; ++k)
        p += out.lambda[k] * std::exp(vm_logpdf(y[i], m[k][i], std::exp(out.phi[k][i])));
      j += data.weight(i) * std::log(p);
    }
    for (int k = 0; k < K; ++k) {
      j += -0.5 * out.zt1[k].squaredNorm() - 0.5 * out.zt2[k].squaredNorm();
      for (int i = 0; i < n; ++i) {
        const double d = (out.phi[k][i] - out.nu[k]) / varsig;
        j += -0.5 * d * d;
      }
      j += -0.5 * out.nu[k] * out.nu[k] / (tau * tau);
    }
    return j;
  };

  double prev = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    // E step
    for (int i = 0; i < n; ++i) {
      double tot = 0.0;
      for (int k = 0; k < K; ++k) {
        out.resp.r(k, i) =
            out.lambda[k] * std::exp(vm_logpdf(y[i], m[k][i], std::exp(out.phi[k][i])));
        tot += out.resp.r(k, i);
      }
      out.resp.r.col(i) /= tot;
    }
    const double j = objective();
    out.trace.push_back(j);
    if (std::abs(j - prev) < cfg.tol) {
      out.converged = true;
      break;
    }
    prev = j;

    // M step: lambda closed form
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) wsum += data.weight(i);
    for (int k = 0; k < K; ++k) {
      double lw = 0.0;
      for (int i = 0; i < n; ++i) lw += out.resp.r(k, i) * data.weight(i);
      out.lambda[k] = lw / wsum;
    }

    // z~ blocks by coordinate gradient ascent (alternating the two fields)
    for (int k = 0; k < K; ++k) {
      for (int coord = 0; coord < 2; ++coord) {
        auto obj = [&, k, coord](const Eigen::VectorXd& zt) {
          return em_svmc_zt_q(data, spec, ctx, out, k, coord, zt);
        };
        auto grad = [&, k, coord](const Eigen::VectorXd& zt) {
          return em_svmc_zt_grad(data, spec, ctx, out, k, coord, zt);
        };
        Eigen::VectorXd& target = (coord == 0) ? out.zt1[k] : out.zt2[k];
        ascend(target, obj, grad, cfg.inner_iters, cfg.step0);
      }
      m[k] = mean_field(k);
    }

    // phi blocks
    for (int k = 0; k < K; ++k) {
      auto obj_phi = [&](const Eigen::VectorXd& ph) {
        double q = 0.0;
        for (int i = 0; i < n; ++i) {
          q += out.resp.r(k, i) * data.weight(i) * vm_logpdf(y[i], m[k][i], std::exp(ph[i]));
          const double d = (ph[i] - out.nu[k]) / varsig;
          q += -0.5 * d * d;
        }
        return q;
      };
      auto grad_phi = [&](const Eigen::VectorXd& ph) {
        Eigen::VectorXd g(n);
        for (int i = 0; i < n; ++i) {
          const double rho = std::exp(ph[i]);
          g[i] = out.resp.r(k, i) * data.weight(i) * rho *
                     (std::cos(y[i] - m[k][i]) - bessel_i_ratio(1, rho)) -
                 (ph[i] - out.nu[k]) / (varsig * varsig);
        }
        return g;
      };
      ascend(out.phi[k], obj_phi, grad_phi, cfg.inner_iters, cfg.step0);
      // nu closed form (maximizer of the unweighted prior terms)
      double sum_phi = 0.0;
      for (int i = 0; i < n; ++i) sum_phi += out.phi[k][i];
      out.nu[k] = (sum_phi / (varsig * varsig)) /
                  (n / (varsig * varsig) + 1.0 / (tau * tau));
    }
  }
  return out;
}

// ---------------------------------------------------------------------

EmSvmpResult em_svmp(const Dataset& data, const ModelSpec& spec, const EmConfig& cfg, Rng& rng) {
  if (spec.kind != ModelKind::SVMP) throw std::domain_error("em_svmp: SVMP spec required");
  const ModelContext ctx = prepare_context(spec, data);
  const int n = data.n();
  const int K = spec.K;
  const int km1 = K - 1;
  const Eigen::VectorXd& y = data.directions;
  const Eigen::MatrixXd& L = ctx.cov.chol;

  ClusterInit init = cluster_init(data, K, rng);
  EmSvmpResult out;
  out.zt.assign(km1, Eigen::VectorXd::Zero(n));
  out.m = init.m;
  out.rho = init.rho;
  out.resp.r.resize(K, n);

  // mixing probabilities with component k's latents replaced by zt_k
  auto mixing_with = [&](int rep, const Eigen::VectorXd& zt_rep) {
    std::vector<Eigen::VectorXd> z(km1);
    for (int k = 0; k < km1; ++k)
      z[k] = L * ((k == rep) ? zt_rep : out.zt[k]) + ctx.mu_mix[k];
    Eigen::MatrixXd lam(K, n);
    Eigen::VectorXd zl(km1);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < km1; ++k) zl[k] = z[k][i];
      lam.col(i) = generalized_inverse_logit(zl);
    }
    return lam;
  };
  auto mixing = [&]() { return mixing_with(-1, Eigen::VectorXd()); };

  Eigen::MatrixXd lam = mixing();
  auto objective = [&]() {
    double j = 0.0;
    for (int i = 0; i < n; ++i) {
      double p = 0.0;
      for (int k = 0; k < K; ++k) p += lam(k, i) * std::exp(vm_logpdf(y[i], out.m[k], out.rho[k]));
      j += data.weight(i) * std::log(p);
    }
    for (int k = 0; k < km1; ++k) j += -0.5 * out.zt[k].squaredNorm();
    for (int k = 0; k < K; ++k) j += -out.rho[k];  // Gamma(1, 1)
    return j;
  };

  double prev = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    lam = mixing();
    for (int i = 0; i < n; ++i) {
      double tot = 0.0;
      for (int k = 0; k < K; ++k) {
        out.resp.r(k, i) = lam(k, i) * std::exp(vm_logpdf(y[i], out.m[k], out.rho[k]));
        tot += out.resp.r(k, i);
      }
      out.resp.r.col(i) /= tot;
    }
    const double j = objective();
    out.trace.push_back(j);
    if (std::abs(j - prev) < cfg.tol) {
      out.converged = true;
      break;
    }
    prev = j;

    // z~ blocks: d/dz~ = L^T (r - lambda) - z~
    for (int k = 0; k < km1; ++k) {
      auto obj_z = [&, k](const Eigen::VectorXd& zt) {
        return em_svmp_zt_q(data, spec, ctx, out, k, zt);
      };
      auto grad_z = [&, k](const Eigen::VectorXd& zt) {
        return em_svmp_zt_grad(data, spec, ctx, out, k, zt);
      };
      ascend(out.zt[k], obj_z, grad_z, cfg.inner_iters, cfg.step0);
    }
    lam = mixing();

    // means closed form, concentrations by gradient ascent
    for (int k = 0; k < K; ++k) {
      double c = 0.0, s = 0.0;
      for (int i = 0; i < n; ++i) {
        const double rw = out.resp.r(k, i) * data.weight(i);
        c += rw * std::cos(y[i]);
        s += rw * std::sin(y[i]);
      }
      if (c != 0.0 || s != 0.0) out.m[k] = arctan_star(c, s);
      double r0 = out.rho[k];
      auto obj_rho = [&](double rr) {
        if (rr <= 0.0) return -std::numeric_limits<double>::infinity();
        double q = -rr;
        for (int i = 0; i < n; ++i)
          q += out.resp.r(k, i) * data.weight(i) * vm_logpdf(y[i], out.m[k], rr);
        return q;
      };
      auto grad_rho = [&](double rr) {
        const double a1 = bessel_i_ratio(1, rr);
        double g = -1.0;
        for (int i = 0; i < n; ++i)
          g += out.resp.r(k, i) * data.weight(i) * (std::cos(y[i] - out.m[k]) - a1);
        return g;
      };
      ascend(r0, obj_rho, grad_rho, cfg.inner_iters, cfg.step0);
      out.rho[k] = r0;
    }
  }

  // sort components by mean direction; remap latents accordingly.
  const auto order = sorted_order(out.m);
  bool identity = true;
  for (int k = 0; k < K; ++k) identity = identity && order[k] == static_cast<std::size_t>(k);
  if (!identity && K == 2) {
    // swapping the two components flips the single mixing latent
    std::swap(out.m[0], out.m[1]);
    std::swap(out.rho[0], out.rho[1]);
    out.zt[0] = -out.zt[0];
    Eigen::MatrixXd r2 = out.resp.r;
    out.resp.r.row(0) = r2.row(1);
    out.resp.r.row(1) = r2.row(0);
  }
  return out;
}

// ---------------------------------------------------------------------
// Block objectives / gradients used by the M steps

double em_svmc_zt_q(const Dataset& data, const ModelSpec& spec, const ModelContext& ctx,
                    const EmSvmcResult& st, int k, int coord, const Eigen::VectorXd& zt) {
  const int n = data.n();
  const Eigen::MatrixXd& L = ctx.cov.chol;
  const Eigen::VectorXd z1 =
      (coord == 0) ? (L * zt + ctx.mu1[k]).eval() : (L * st.zt1[k] + ctx.mu1[k]).eval();
  const Eigen::VectorXd z2 =
      (coord == 0) ? (L * st.zt2[k] + ctx.mu2[k]).eval() : (L * zt + ctx.mu2[k]).eval();
  double q = -0.5 * zt.squaredNorm();
  for (int i = 0; i < n; ++i) {
    const double mm = arctan_star(z1[i], z2[i]);
    q += st.resp.r(k, i) * data.weight(i) *
         vm_logpdf(data.directions[i], mm, std::exp(st.phi[k][i]));
  }
  (void)spec;
  return q;
}

Eigen::VectorXd em_svmc_zt_grad(const Dataset& data, const ModelSpec& spec,
                                const ModelContext& ctx, const EmSvmcResult& st, int k,
                                int coord, const Eigen::VectorXd& zt) {
  const int n = data.n();
  const Eigen::MatrixXd& L = ctx.cov.chol;
  const Eigen::VectorXd z1 =
      (coord == 0) ? (L * zt + ctx.mu1[k]).eval() : (L * st.zt1[k] + ctx.mu1[k]).eval();
  const Eigen::VectorXd z2 =
      (coord == 0) ? (L * st.zt2[k] + ctx.mu2[k]).eval() : (L * zt + ctx.mu2[k]).eval();
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) {
    const double mm = arctan_star(z1[i], z2[i]);
    const double rr = z1[i] * z1[i] + z2[i] * z2[i];
    const double core = st.resp.r(k, i) * data.weight(i) * std::exp(st.phi[k][i]) *
                        std::sin(data.directions[i] - mm);
    u[i] = (coord == 0) ? core * (-z2[i] / rr) : core * (z1[i] / rr);
  }
  (void)spec;
  return L.transpose() * u - zt;
}

double em_svmp_zt_q(const Dataset& data, const ModelSpec& spec, const ModelContext& ctx,
                    const EmSvmpResult& st, int k, const Eigen::VectorXd& zt) {
  const int n = data.n();
  const int km1 = spec.K - 1;
  const Eigen::MatrixXd& L = ctx.cov.chol;
  std::vector<Eigen::VectorXd> z(km1);
  for (int q2 = 0; q2 < km1; ++q2)
    z[q2] = L * ((q2 == k) ? zt : st.zt[q2]) + ctx.mu_mix[q2];
  double q = -0.5 * zt.squaredNorm();
  Eigen::VectorXd zl(km1);
  for (int i = 0; i < n; ++i) {
    for (int q2 = 0; q2 < km1; ++q2) zl[q2] = z[q2][i];
    const Eigen::VectorXd lam = generalized_inverse_logit(zl);
    for (int kk = 0; kk < spec.K; ++kk)
      q += st.resp.r(kk, i) * data.weight(i) * std::log(lam[kk]);
  }
  return q;
}

Eigen::VectorXd em_svmp_zt_grad(const Dataset& data, const ModelSpec& spec,
                                const ModelContext& ctx, const EmSvmpResult& st, int k,
                                const Eigen::VectorXd& zt) {
  const int n = data.n();
  const int km1 = spec.K - 1;
  const Eigen::MatrixXd& L = ctx.cov.chol;
  std::vector<Eigen::VectorXd> z(km1);
  for (int q2 = 0; q2 < km1; ++q2)
    z[q2] = L * ((q2 == k) ? zt : st.zt[q2]) + ctx.mu_mix[q2];
  Eigen::VectorXd u(n), zl(km1);
  for (int i = 0; i < n; ++i) {
    for (int q2 = 0; q2 < km1; ++q2) zl[q2] = z[q2][i];
    const Eigen::VectorXd lam = generalized_inverse_logit(zl);
    u[i] = data.weight(i) * (st.resp.r(k, i) - lam[k]);
  }
  return L.transpose() * u - zt;
}

// ---------------------------------------------------------------------

ParamState initial_state_ivm(const ModelSpec& spec, const EmIvmResult& em) {
  ParamState st;
  st.mean_angle = em.m;
  st.lambda = em.lambda;
  st.phi.resize(spec.K);
  for (int k = 0; k < spec.K; ++k)
    st.phi[k] = Eigen::VectorXd::Constant(1, std::log(std::max(em.rho[k], 1e-3)));
  return st;
}

ParamState initial_state_svmc(const ModelSpec& spec, const ModelContext& ctx,
                              const EmSvmcResult& em) {
  ParamState st;
  const int K = spec.K;
  st.z1.resize(K);
  st.z2.resize(K);
  for (int k = 0; k < K; ++k) {
    st.z1[k] = ctx.cov.chol * em.zt1[k] + ctx.mu1[k];
    st.z2[k] = ctx.cov.chol * em.zt2[k] + ctx.mu2[k];
  }
  st.phi = em.phi;
  st.nu = em.nu;
  st.lambda = em.lambda;
  const int n = static_cast<int>(em.resp.r.cols());
  st.zeta.resize(n);
  for (int i = 0; i < n; ++i) {
    int best = 0;
    for (int k = 1; k < K; ++k)
      if (em.resp.r(k, i) > em.resp.r(best, i)) best = k;
    st.zeta[i] = best;
  }
  return st;
}

ParamState initial_state_svmp(const ModelSpec& spec, const ModelContext& ctx,
                              const EmSvmpResult& em) {
  ParamState st;
  st.zmix.resize(spec.K - 1);
  for (int k = 0; k + 1 < spec.K; ++k) st.zmix[k] = ctx.cov.chol * em.zt[k] + ctx.mu_mix[k];
  st.mean_angle = em.m;
  st.phi.resize(spec.K);
  for (int k = 0; k < spec.K; ++k)
    st.phi[k] = Eigen::VectorXd::Constant(1, std::log(std::max(em.rho[k], 1e-3)));
  return st;
}

}  // namespace simplexdir

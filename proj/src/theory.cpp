#include "simplexdir/theory.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "simplexdir/bessel.hpp"
#include "simplexdir/special.hpp"

namespace simplexdir {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PriorMoments moments_from_resultant(double c, double s) {
  PriorMoments out;
  const double r = std::hypot(c, s);
  out.variance = std::clamp(1.0 - r, 0.0, 1.0);
  if (r < 1e-14) {
    out.degenerate_mean = true;
    out.mean = Angle(std::numbers::pi);
  } else {
    out.mean = Angle(arctan_star(c, s));
  }
  return out;
}

}  // namespace

PriorMoments svm_prior_moments(double mu0, double alpha_mu, double sigma, double rho) {
  if (mu0 < 0.0 || sigma <= 0.0 || rho < 0.0)
    throw std::domain_error("svm_prior_moments: invalid parameters");
  Pn2Params pn;
  pn.mu = mu0 * Eigen::Vector2d(std::cos(alpha_mu), std::sin(alpha_mu));
  pn.sigma = sigma;
  const double ecos_m = 1.0 - pn2_circular_variance(pn);  // E[cos(m - alpha)]
  const double a1 = bessel_i_ratio(1, rho);
  PriorMoments out;
  out.mean = Angle(alpha_mu);
  out.degenerate_mean = (mu0 == 0.0);
  if (out.degenerate_mean) out.mean = Angle(std::numbers::pi);
  out.variance = std::clamp(1.0 - a1 * ecos_m, 0.0, 1.0);
  return out;
}

PriorMoments svmp_prior_moments(std::span<const double> ms, std::span<const double> rhos,
                                std::span<const double> probs) {
  const std::size_t k = ms.size();
  if (k == 0 || rhos.size() != k || probs.size() != k)
    throw std::domain_error("svmp_prior_moments: size mismatch");
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) throw std::domain_error("svmp_prior_moments: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::domain_error("svmp_prior_moments: probabilities must sum to 1");
  double c = 0.0, s = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double a = bessel_i_ratio(1, rhos[i]);
    c += probs[i] * a * std::cos(ms[i]);
    s += probs[i] * a * std::sin(ms[i]);
  }
  return moments_from_resultant(c, s);
}

CorrelationValue svmp_prior_correlation(std::span<const double> ms,
                                        std::span<const double> rhos,
                                        const Eigen::MatrixXd& joint) {
  const int k = static_cast<int>(ms.size());
  if (k == 0 || static_cast<int>(rhos.size()) != k || joint.rows() != k || joint.cols() != k)
    throw std::domain_error("svmp_prior_correlation: size mismatch");
  double total = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (joint(i, j) < -1e-15) throw std::domain_error("svmp_prior_correlation: negative joint entry");
      total += joint(i, j);
    }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::domain_error("svmp_prior_correlation: joint must sum to 1");
  if (k == 1) return {0.0, true};

  const Eigen::VectorXd marg_l = joint.rowwise().sum();
  const Eigen::VectorXd marg_lp = joint.colwise().sum();
  std::vector<double> pl(marg_l.data(), marg_l.data() + k);
  std::vector<double> plp(marg_lp.data(), marg_lp.data() + k);
  const double al = svmp_prior_moments(ms, rhos, pl).mean.value();
  const double alp = svmp_prior_moments(ms, rhos, plp).mean.value();

  double num = 0.0;
  for (int i = 0; i < k; ++i) {
    const double ai = bessel_i_ratio(1, rhos[i]);
    for (int j = 0; j < k; ++j) {
      const double aj = bessel_i_ratio(1, rhos[j]);
      num += joint(i, j) * ai * aj * std::sin(ms[i] - al) * std::sin(ms[j] - alp);
    }
  }
  double el = 0.0, elp = 0.0;
  for (int i = 0; i < k; ++i) {
    const double a2 = bessel_i_ratio(2, rhos[i]);
    el += marg_l[i] * a2 * std::cos(2.0 * (ms[i] - al));
    elp += marg_lp[i] * a2 * std::cos(2.0 * (ms[i] - alp));
  }
  const double d1 = 0.5 * (1.0 - el);
  const double d2 = 0.5 * (1.0 - elp);
  if (d1 <= 0.0 || d2 <= 0.0) return {0.0, true};
  return {std::clamp(num / std::sqrt(d1 * d2), -1.0, 1.0), false};
}

PriorMoments svmp2_prior_moments(double m1, double m2, double rho1, double rho2) {
  const double ms[2] = {m1, m2};
  const double rhos[2] = {rho1, rho2};
  const double probs[2] = {0.5, 0.5};
  return svmp_prior_moments(ms, rhos, probs);
}

double inverse_logit(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logistic_expectation() { return 0.5; }

TruncatedBivariateTerms truncated_bivariate_terms(const LogisticBoundInputs& in) {
  if (std::abs(in.s) >= 1.0)
    throw std::domain_error("truncated_bivariate_terms: |s| must be < 1");
  if (!(in.z_eps > 0.0 && in.z_eps <= 2.0))
    throw std::domain_error("truncated_bivariate_terms: z_eps must lie in (0, 2]");
  TruncatedBivariateTerms out;
  const double z = in.z_eps;
  out.e_one = bvn_rect_m10(-z, z, z, kInf, in.s);
  out.e_two = bvn_rect_m11(-z, z, -z, z, in.s);
  return out;
}

LogisticProductBounds logistic_product_bounds(const LogisticBoundInputs& in) {
  if (std::abs(in.s) >= 1.0)
    throw std::domain_error("logistic_product_bounds: |s| must be < 1");
  if (!(in.z_eps > 0.0 && in.z_eps <= 2.0))
    throw std::domain_error("logistic_product_bounds: z_eps must lie in (0, 2]");
  const double z = in.z_eps;
  LogisticProductBounds out;
  if (std::abs(in.s) < 1e-10) {
    // independence: E[f(Z_l) f(Z_l')] = E[f]^2 = 1/4
    out.f_product_expectation = 0.25;
  } else {
    const double s = in.s;
    const double p_hh = bvn_upper(z, z, s);            // both above z_eps
    const double p_all = bvn_upper(-z, -z, s);         // both above -z_eps
    const double p_cross = bvn_upper(z, -z, s);        // Z_l above z_eps, Z_l' above -z_eps
    const double e_one = bvn_rect_m10(-z, z, z, kInf, s);
    const double e_one_wide = bvn_rect_m10(-z, z, -z, kInf, s);
    const double e_two = bvn_rect_m11(-z, z, -z, z, s);
    out.f_product_expectation = 0.25 * (p_hh + p_all) + 0.5 * p_cross +
                                (e_one + e_one_wide) / (2.0 * z) + e_two / (4.0 * z * z);
  }
  const double width = 2.0 * inverse_logit(-z) *
                       (norm_cdf(-z) + (0.5 - norm_cdf(-z)) * inverse_logit(z));
  // E[f f] bounds E[psi psi] from above for s >= 0 and from below for s < 0;
  // the surrogate error magnitude is bounded by `width` either way.
  if (in.s >= 0.0) {
    out.upper = out.f_product_expectation;
    out.lower = out.upper - width;
  } else {
    out.lower = out.f_product_expectation;
    out.upper = out.lower + width;
  }
  return out;
}

// ---- Monte Carlo oracles ----------------------------------------------

double mc_draw(const McGenerator& gen, Rng& rng) {
  switch (gen.kind) {
    case McGenerator::Kind::Uniform:
      return rng.uniform(0.0, kTwoPi);
    case McGenerator::Kind::VonMises:
      return vm_sample(gen.vm, rng);
    case McGenerator::Kind::ProjectedNormal: {
      const double z1 = gen.pn2.mu.x() + gen.pn2.sigma * rng.normal();
      const double z2 = gen.pn2.mu.y() + gen.pn2.sigma * rng.normal();
      return arctan_star(z1, z2);
    }
    case McGenerator::Kind::Svm: {
      const double z1 = gen.pn2.mu.x() + gen.pn2.sigma * rng.normal();
      const double z2 = gen.pn2.mu.y() + gen.pn2.sigma * rng.normal();
      const double m = arctan_star(z1, z2);
      return vm_sample({Angle(m), gen.svm_rho}, rng);
    }
    case McGenerator::Kind::SvmpMixture: {
      const int k = rng.categorical(std::span<const double>(gen.probs));
      return vm_sample({Angle(gen.ms[k]), gen.rhos[k]}, rng);
    }
    case McGenerator::Kind::Svmp2: {
      const double lam = inverse_logit(rng.normal());
      const int k = (rng.uniform() < lam) ? 0 : 1;
      return vm_sample({Angle(gen.ms[k]), gen.rhos[k]}, rng);
    }
  }
  throw std::logic_error("mc_draw: unknown generator");
}

McMoments mc_moment_oracle(const McGenerator& gen, std::int64_t n_samples, Rng& rng,
                           int blocks, int threads) {
  if (n_samples < 1) throw std::domain_error("mc_moment_oracle: need n_samples >= 1");
  blocks = std::max(1, blocks);
  const std::int64_t per = (n_samples + blocks - 1) / blocks;
  struct BlockStat {
    double c = 0.0, s = 0.0;
    std::int64_t n = 0;
  };
  std::vector<BlockStat> stats(blocks);
  auto run_block = [&](int b) {
    Rng local = rng.substream(static_cast<std::uint64_t>(b) + 1);
    BlockStat st;
    const std::int64_t lo = b * per;
    const std::int64_t hi = std::min<std::int64_t>(n_samples, lo + per);
    for (std::int64_t i = lo; i < hi; ++i) {
      const double y = mc_draw(gen, local);
      st.c += std::cos(y);
      st.s += std::sin(y);
      ++st.n;
    }
    return st;
  };
  if (threads > 1) {
    std::vector<std::future<BlockStat>> futs;
    futs.reserve(blocks);
    for (int b = 0; b < blocks; ++b) futs.push_back(std::async(std::launch::async, run_block, b));
    for (int b = 0; b < blocks; ++b) stats[b] = futs[b].get();
  } else {
    for (int b = 0; b < blocks; ++b) stats[b] = run_block(b);
  }
  double c = 0.0, s = 0.0;
  std::int64_t n = 0;
  for (const auto& st : stats) {
    c += st.c;
    s += st.s;
    n += st.n;
  }
  McMoments out;
  const double rbar = std::hypot(c, s) / static_cast<double>(n);
  out.summary.resultant_length = std::min(rbar, 1.0);
  out.summary.variance = std::clamp(1.0 - rbar, 0.0, 1.0);
  if (rbar < 1e-14) {
    out.summary.degenerate = true;
    out.summary.mean = Angle(std::numbers::pi);
  } else {
    out.summary.mean = Angle(arctan_star(c, s));
  }
  // block spread for SEs
  std::vector<double> bvar, bmean;
  for (const auto& st : stats) {
    if (st.n == 0) continue;
    const double rb = std::hypot(st.c, st.s) / static_cast<double>(st.n);
    bvar.push_back(1.0 - rb);
    if (rb > 1e-14) bmean.push_back(circular_distance(arctan_star(st.c, st.s), out.summary.mean.value()));
  }
  auto block_se = [](const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0) / static_cast<double>(v.size()));
  };
  out.variance_se = block_se(bvar);
  double md = 0.0;
  for (double d : bmean) md += d * d;
  out.mean_se = bmean.empty() ? 0.0 : std::sqrt(md / static_cast<double>(bmean.size()) /
                                                static_cast<double>(bmean.size()));
  return out;
}

namespace {

std::pair<double, double> draw_pair(const McPairGenerator& gen, Rng& rng) {
  switch (gen.kind) {
    case McPairGenerator::Kind::SvmPair: {
      const double sb = std::sqrt(std::max(0.0, 1.0 - gen.corr * gen.corr));
      auto corr_pair = [&](double mu) {
        const double n1 = rng.normal(), n2 = rng.normal();
        const double a = mu + gen.base.sigma * n1;
        const double b = mu + gen.base.sigma * (gen.corr * n1 + sb * n2);
        return std::pair<double, double>(a, b);
      };
      const auto [z1a, z1b] = corr_pair(gen.base.mu.x());
      const auto [z2a, z2b] = corr_pair(gen.base.mu.y());
      const double ma = arctan_star(z1a, z2a);
      const double mb = arctan_star(z1b, z2b);
      return {vm_sample({Angle(ma), gen.rho}, rng), vm_sample({Angle(mb), gen.rho}, rng)};
    }
    case McPairGenerator::Kind::SvmpJointLabels: {
      const int k2 = static_cast<int>(gen.ms.size());
      std::vector<double> flat(gen.joint.data(), gen.joint.data() + k2 * k2);
      const int idx = rng.categorical(std::span<const double>(flat));
      // Eigen is column-major: idx = i + k2 * j
      const int i = idx % k2, j = idx / k2;
      return {vm_sample({Angle(gen.ms[i]), gen.rhos[i]}, rng),
              vm_sample({Angle(gen.ms[j]), gen.rhos[j]}, rng)};
    }
    case McPairGenerator::Kind::Svmp2Latent: {
      const double sb = std::sqrt(std::max(0.0, 1.0 - gen.corr * gen.corr));
      const double n1 = rng.normal(), n2 = rng.normal();
      const double zl = n1, zlp = gen.corr * n1 + sb * n2;
      const int i = (rng.uniform() < inverse_logit(zl)) ? 0 : 1;
      const int j = (rng.uniform() < inverse_logit(zlp)) ? 0 : 1;
      return {vm_sample({Angle(gen.ms[i]), gen.rhos[i]}, rng),
              vm_sample({Angle(gen.ms[j]), gen.rhos[j]}, rng)};
    }
  }
  throw std::logic_error("draw_pair: unknown generator");
}

}  // namespace

McCorrelation mc_pair_correlation(const McPairGenerator& gen, double alpha_l,
                                  double alpha_lp, std::int64_t n_samples, Rng& rng,
                                  int blocks) {
  blocks = std::max(2, blocks);
  const std::int64_t per = (n_samples + blocks - 1) / blocks;
  std::vector<double> bcorr;
  double num = 0.0, d1 = 0.0, d2 = 0.0;
  std::int64_t n = 0;
  for (int b = 0; b < blocks; ++b) {
    Rng local = rng.substream(static_cast<std::uint64_t>(b) + 1);
    double bn = 0.0, b1 = 0.0, b2 = 0.0;
    const std::int64_t lo = b * per;
    const std::int64_t hi = std::min<std::int64_t>(n_samples, lo + per);
    for (std::int64_t i = lo; i < hi; ++i) {
      const auto [ya, yb] = draw_pair(gen, local);
      const double sa = std::sin(ya - alpha_l);
      const double sb = std::sin(yb - alpha_lp);
      bn += sa * sb;
      b1 += sa * sa;
      b2 += sb * sb;
    }
    const std::int64_t cnt = hi - lo;
    if (cnt > 0 && b1 > 0.0 && b2 > 0.0) bcorr.push_back(bn / std::sqrt(b1 * b2));
    num += bn;
    d1 += b1;
    d2 += b2;
    n += cnt;
  }
  McCorrelation out;
  out.numerator = num / static_cast<double>(n);
  out.value = (d1 > 0.0 && d2 > 0.0) ? num / std::sqrt(d1 * d2) : 0.0;
  if (bcorr.size() >= 2) {
    double m = 0.0;
    for (double x : bcorr) m += x;
    m /= static_cast<double>(bcorr.size());
    double ss = 0.0;
    for (double x : bcorr) ss += (x - m) * (x - m);
    out.se = std::sqrt(ss / (static_cast<double>(bcorr.size()) - 1.0) /
                       static_cast<double>(bcorr.size()));
  }
  return out;
}

McEstimate mc_logistic_product(double s, std::int64_t n_samples, Rng& rng, int blocks) {
  blocks = std::max(2, blocks);
  const std::int64_t per = (n_samples + blocks - 1) / blocks;
  const double sb = std::sqrt(std::max(0.0, 1.0 - s * s));
  std::vector<double> bm;
  double total = 0.0;
  std::int64_t n = 0;
  for (int b = 0; b < blocks; ++b) {
    Rng local = rng.substream(static_cast<std::uint64_t>(b) + 1);
    double acc = 0.0;
    const std::int64_t lo = b * per;
    const std::int64_t hi = std::min<std::int64_t>(n_samples, lo + per);
    for (std::int64_t i = lo; i < hi; ++i) {
      const double n1 = local.normal(), n2 = local.normal();
      acc += inverse_logit(n1) * inverse_logit(s * n1 + sb * n2);
    }
    if (hi > lo) bm.push_back(acc / static_cast<double>(hi - lo));
    total += acc;
    n += hi - lo;
  }
  McEstimate out;
  out.value = total / static_cast<double>(n);
  if (bm.size() >= 2) {
    double m = 0.0;
    for (double x : bm) m += x;
    m /= static_cast<double>(bm.size());
    double ss = 0.0;
    for (double x : bm) ss += (x - m) * (x - m);
    out.se = std::sqrt(ss / (static_cast<double>(bm.size()) - 1.0) / static_cast<double>(bm.size()));
  }
  return out;
}

}  // namespace simplexdir

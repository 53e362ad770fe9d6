#include "simplexdir/gp.hpp"

#include <cmath>
#include <stdexcept>

#include "simplexdir/angle.hpp"

namespace simplexdir {

Eigen::VectorXd CovMatrix::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd y = chol.triangularView<Eigen::Lower>().solve(b);
  return chol.transpose().triangularView<Eigen::Upper>().solve(y);
}

double sqexp_kernel(const SimplexPoint& x, const SimplexPoint& x2, const GpSpec& spec) {
  if (spec.omega <= 0.0 || spec.sigma <= 0.0)
    throw std::domain_error("sqexp_kernel: omega and sigma must be positive");
  const double d2 = (x.coords() - x2.coords()).squaredNorm();
  return spec.sigma * spec.sigma * std::exp(-d2 / (2.0 * spec.omega * spec.omega));
}

namespace {

bool try_cholesky(const Eigen::MatrixXd& m, Eigen::MatrixXd* chol) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return false;
  *chol = llt.matrixL();
  return true;
}

}  // namespace

CovMatrix build_cov(const std::vector<SimplexPoint>& locs, const GpSpec& spec) {
  const int n = static_cast<int>(locs.size());
  if (n < 1) throw std::domain_error("build_cov: need at least one location");
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = sqexp_kernel(locs[i], locs[j], spec);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  const double s2 = spec.sigma * spec.sigma;
  CovMatrix out;
  if (spec.jitter >= 0.0) {
    out.k = k + spec.jitter * Eigen::MatrixXd::Identity(n, n);
    out.jitter_used = spec.jitter;
    if (!try_cholesky(out.k, &out.chol)) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.k);
      const double cond = es.eigenvalues().maxCoeff() /
                          std::max(es.eigenvalues().minCoeff(), 1e-300);
      throw std::runtime_error("build_cov: Cholesky failed at fixed jitter " +
                               std::to_string(spec.jitter) +
                               " (condition estimate " + std::to_string(cond) + ")");
    }
    return out;
  }
  double jit = 1e-8 * s2;
  const double jit_max = 1e-4 * s2;
  for (;;) {
    out.k = k + jit * Eigen::MatrixXd::Identity(n, n);
    out.jitter_used = jit;
    if (try_cholesky(out.k, &out.chol)) return out;
    if (jit >= jit_max) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.k);
      const double cond = es.eigenvalues().maxCoeff() /
                          std::max(es.eigenvalues().minCoeff(), 1e-300);
      throw std::runtime_error("build_cov: Cholesky failed after jitter escalation to " +
                               std::to_string(jit) + " (condition estimate " +
                               std::to_string(cond) + ")");
    }
    jit *= 10.0;
  }
}

GpConditional gp_conditional(const std::vector<SimplexPoint>& train_locs,
                             const std::vector<SimplexPoint>& test_locs,
                             const Eigen::VectorXd& train_vals, const GpSpec& spec) {
  const int n = static_cast<int>(train_locs.size());
  const int m = static_cast<int>(test_locs.size());
  if (train_vals.size() != n) throw std::domain_error("gp_conditional: value length mismatch");
  if (spec.mean1.size() > 1)
    throw std::domain_error("gp_conditional: per-location means not defined at test points");
  const double mu = spec.mean1_at(0);

  Eigen::MatrixXd ktt(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) ktt(i, j) = ktt(j, i) = sqexp_kernel(test_locs[i], test_locs[j], spec);

  GpConditional out;
  if (n == 0) {
    out.mean = Eigen::VectorXd::Constant(m, mu);
    out.cov = ktt;
    return out;
  }
  const CovMatrix ctrain = build_cov(train_locs, spec);
  Eigen::MatrixXd cross(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) cross(i, j) = sqexp_kernel(train_locs[i], test_locs[j], spec);

  // A = Sigma_train^{-1} cross via the cached factor
  Eigen::MatrixXd a = ctrain.chol.triangularView<Eigen::Lower>().solve(cross);
  Eigen::MatrixXd b = ctrain.chol.transpose().triangularView<Eigen::Upper>().solve(a);
  out.mean = Eigen::VectorXd::Constant(m, mu) + b.transpose() * (train_vals - Eigen::VectorXd::Constant(n, mu));
  out.cov = ktt - a.transpose() * a;
  // symmetrize rounding noise
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  return out;
}

ProjectedGpSample projected_gp_sample(const GpSpec& spec,
                                      const std::vector<SimplexPoint>& locs, Rng& rng) {
  const int n = static_cast<int>(locs.size());
  const CovMatrix cov = build_cov(locs, spec);
  ProjectedGpSample out;
  out.angles.resize(n);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Eigen::VectorXd xi1(n), xi2(n);
    for (int i = 0; i < n; ++i) xi1[i] = rng.normal();
    for (int i = 0; i < n; ++i) xi2[i] = rng.normal();
    out.z1 = cov.chol * xi1;
    out.z2 = cov.chol * xi2;
    for (int i = 0; i < n; ++i) {
      out.z1[i] += spec.mean1_at(i);
      out.z2[i] += spec.mean2_at(i);
    }
    bool origin_hit = false;
    for (int i = 0; i < n; ++i) {
      if (out.z1[i] * out.z1[i] + out.z2[i] * out.z2[i] < 1e-300) {
        origin_hit = true;
        break;
      }
      out.angles[i] = arctan_star(out.z1[i], out.z2[i]);
    }
    if (!origin_hit) return out;
  }
  throw std::runtime_error("projected_gp_sample: repeated origin hits");
}

}  // namespace simplexdir

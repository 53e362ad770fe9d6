#include "simplexdir/circular.hpp"

#include <cmath>
#include <stdexcept>

#include "simplexdir/bessel.hpp"
#include "simplexdir/special.hpp"

namespace simplexdir {

double vm_log_density(double y, const VonMisesParams& p) {
  if (p.concentration < 0.0) throw std::domain_error("vm_log_density: negative concentration");
  const double rho = p.concentration;
  return rho * std::cos(y - p.mean.value()) - std::log(kTwoPi) - log_bessel_i0(rho);
}

double vm_sample(const VonMisesParams& p, Rng& rng) {
  const double rho = p.concentration;
  if (rho < 1e-12) return rng.uniform(0.0, kTwoPi);
  const double a = 1.0 + std::sqrt(1.0 + 4.0 * rho * rho);
  const double b = (a - std::sqrt(2.0 * a)) / (2.0 * rho);
  const double r = (1.0 + b * b) / (2.0 * b);
  for (;;) {
    const double u1 = rng.uniform();
    const double z = std::cos(std::numbers::pi * u1);
    const double f = (1.0 + r * z) / (r + z);
    const double c = rho * (r - f);
    const double u2 = rng.uniform();
    if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
      const double u3 = rng.uniform();
      const double sign = (u3 > 0.5) ? 1.0 : -1.0;
      return wrap_angle(sign * std::acos(f) + p.mean.value());
    }
  }
}

double pn2_density(double y, const Pn2Params& p) {
  if (p.sigma <= 0.0) throw std::domain_error("pn2_density: sigma must be positive");
  const double m0 = p.mu0() / p.sigma;  // only mu0/sigma matters for the angle law
  if (m0 == 0.0) return 1.0 / kTwoPi;
  const double alpha = p.alpha_mu().value();
  const double a = m0 * std::cos(y - alpha);
  return norm_pdf(m0 * std::sin(y - alpha)) * (norm_pdf(a) + a * norm_cdf(a));
}

double pn2_circular_variance(const Pn2Params& p) {
  if (p.sigma <= 0.0) throw std::domain_error("pn2_circular_variance: sigma must be positive");
  const double mu0 = p.mu0();
  if (mu0 == 0.0) return 1.0;
  const double beta = mu0 * mu0 / (4.0 * p.sigma * p.sigma);
  const double scaled = bessel_i_scaled(0, beta) + bessel_i_scaled(1, beta);
  const double ecos = std::sqrt(std::numbers::pi * beta / 2.0) * scaled;
  return std::clamp(1.0 - ecos, 0.0, 1.0);
}

CircularSummary circular_summary(std::span<const double> angles) {
  if (angles.empty()) throw std::domain_error("circular_summary: empty sample");
  double sc = 0.0, ss = 0.0;
  for (double y : angles) {
    sc += std::cos(y);
    ss += std::sin(y);
  }
  CircularSummary out;
  const double rbar = std::sqrt(sc * sc + ss * ss) / static_cast<double>(angles.size());
  out.resultant_length = std::min(rbar, 1.0);
  out.variance = std::clamp(1.0 - rbar, 0.0, 1.0);
  if (rbar < 1e-14) {
    out.degenerate = true;
    out.mean = Angle(std::numbers::pi);
  } else {
    out.mean = Angle(arctan_star(sc, ss));
  }
  return out;
}

CircularSummary circular_summary(const Eigen::VectorXd& angles) {
  return circular_summary(std::span<const double>(angles.data(), static_cast<std::size_t>(angles.size())));
}

double circular_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::domain_error("circular_correlation: length mismatch");
  if (a.size() < 2) throw std::domain_error("circular_correlation: need at least 2 pairs");
  const double ma = circular_summary(a).mean.value();
  const double mb = circular_summary(b).mean.value();
  double num = 0.0, da2 = 0.0, db2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double sa = std::sin(a[i] - ma);
    const double sb = std::sin(b[i] - mb);
    num += sa * sb;
    da2 += sa * sa;
    db2 += sb * sb;
  }
  const double den = std::sqrt(da2 * db2);
  if (den == 0.0) return 0.0;
  return std::clamp(num / den, -1.0, 1.0);
}

}  // namespace simplexdir

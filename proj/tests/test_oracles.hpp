// Shared test-side oracles: quadrature routines kept independent of the
// production numerics they check.
#ifndef SIMPLEXDIR_TEST_ORACLES_HPP_
#define SIMPLEXDIR_TEST_ORACLES_HPP_

#include <cmath>
#include <functional>
#include <numbers>

namespace oracles {

// Composite Simpson quadrature of the Bessel integral definition
// I_n(rho) = (1/2pi) int_0^{2pi} cos(n y) exp(rho cos y) dy.
inline double bessel_quadrature(int n, double rho, int nodes = 200000) {
  const double tp = 2.0 * std::numbers::pi;
  const double h = tp / nodes;
  double s = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double y = i * h;
    s += std::cos(n * y) * std::exp(rho * std::cos(y));
  }
  return s * h / tp;
}

// Trapezoid rule over one period (spectrally accurate for periodic f).
inline double periodic_integral(const std::function<double(double)>& f, int nodes = 4096) {
  const double tp = 2.0 * std::numbers::pi;
  const double h = tp / nodes;
  double s = 0.0;
  for (int i = 0; i < nodes; ++i) s += f(i * h);
  return s * h;
}

// Radial integral int_0^inf r N2((r cos y, r sin y); mu, sigma^2 I) dr.
inline double pn2_radial_quadrature(double y, double mu1, double mu2, double sigma) {
  const double mu0 = std::hypot(mu1, mu2);
  const double ub = mu0 + 12.0 * sigma;
  const int nodes = 40000;
  const double h = ub / nodes;
  auto dens = [&](double r) {
    const double dx = r * std::cos(y) - mu1;
    const double dy = r * std::sin(y) - mu2;
    return r / (2.0 * std::numbers::pi * sigma * sigma) *
           std::exp(-0.5 * (dx * dx + dy * dy) / (sigma * sigma));
  };
  double s = 0.5 * (dens(0.0) + dens(ub));
  for (int i = 1; i < nodes; ++i) s += dens(i * h);
  return s * h;
}

// Composite Gauss-Legendre (10-pt) 2-D quadrature of f(x, y) * bvn density
// over [a1,b1] x [a2,b2] with correlation r; panels^2 panels.
inline double bvn_quadrature(double a1, double b1, double a2, double b2, double r,
                             const std::function<double(double, double)>& f, int panels = 30) {
  static const double gx[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                               0.8650633666889845, 0.9739065285171717};
  static const double gw[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                               0.1494513491505806, 0.0666713443086881};
  const double sb = std::sqrt(1.0 - r * r);
  auto dens = [&](double x, double y) {
    const double c = (y - r * x) / sb;
    return std::exp(-0.5 * (x * x + c * c)) / (2.0 * std::numbers::pi * sb);
  };
  const double hx = (b1 - a1) / panels, hy = (b2 - a2) / panels;
  double total = 0.0;
  for (int px = 0; px < panels; ++px) {
    const double cx = a1 + (px + 0.5) * hx;
    for (int py = 0; py < panels; ++py) {
      const double cy = a2 + (py + 0.5) * hy;
      double acc = 0.0;
      for (int i = 0; i < 5; ++i) {
        for (int si = -1; si <= 1; si += 2) {
          const double x = cx + si * 0.5 * hx * gx[i];
          double inner = 0.0;
          for (int j = 0; j < 5; ++j)
            for (int sj = -1; sj <= 1; sj += 2) {
              const double y = cy + sj * 0.5 * hy * gx[j];
              inner += gw[j] * f(x, y) * dens(x, y);
            }
          acc += gw[i] * inner;
        }
      }
      total += acc * 0.25 * hx * hy;
    }
  }
  return total;
}

}  // namespace oracles

#endif

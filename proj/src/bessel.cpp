#include "simplexdir/bessel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace simplexdir {

namespace {

constexpr double kSeriesCutoff = 15.0;

// Power series: I_n(x) = sum_m (x/2)^{n+2m} / (m! (n+m)!).
double series_i(int n, double x) {
  const double h = 0.5 * x;
  double term = std::exp(n * std::log(h) - std::lgamma(n + 1.0));
  if (x == 0.0) term = (n == 0) ? 1.0 : 0.0;
  double sum = term;
  for (int m = 1; m < 400; ++m) {
    term *= h * h / (static_cast<double>(m) * (m + n));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// Asymptotic expansion of e^{-x} I_n(x), truncated at the smallest term.
double asym_scaled_i(int n, double x) {
  const double mu = 4.0 * n * n;
  double term = 1.0, sum = 1.0;
  double prev = std::abs(term);
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * x * k);
    if (std::abs(term) >= prev) break;  // divergent tail reached
    sum += term;
    prev = std::abs(term);
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

// Backward (Miller) recurrence for the ratios q_k = I_k / I_{k-1}.
// Returns q_1, ..., q_n.
std::vector<double> miller_ratios(int n, double x) {
  const int top = static_cast<int>(x) + 40 + 2 * n;
  double q = 0.0;
  std::vector<double> out(n + 1, 0.0);
  for (int k = top; k >= 1; --k) {
    q = 1.0 / (2.0 * k / x + q);
    if (k <= n) out[k] = q;
  }
  return out;
}

}  // namespace

double bessel_i_scaled(int n, double x) {
  if (n < 0) n = -n;
  if (x < 0.0) throw std::domain_error("bessel_i_scaled: negative argument");
  if (x <= kSeriesCutoff) return series_i(n, x) * std::exp(-x);
  return asym_scaled_i(n, x);
}

double log_bessel_i0(double x) {
  if (x < 0.0) throw std::domain_error("log_bessel_i0: negative argument");
  if (!std::isfinite(x)) return x;
  if (x <= kSeriesCutoff) return std::log(series_i(0, x));
  return x + std::log(asym_scaled_i(0, x));
}

double bessel_i_ratio(int n, double rho) {
  if (rho < 0.0) throw std::domain_error("bessel_i_ratio: negative concentration");
  if (n < 0) n = -n;
  if (n == 0) return 1.0;
  if (rho == 0.0) return 0.0;
  if (!std::isfinite(rho)) return 1.0;
  if (rho <= kSeriesCutoff) return series_i(n, rho) / series_i(0, rho);
  if (rho <= 256.0) {
    const auto q = miller_ratios(n, rho);
    double r = 1.0;
    for (int k = 1; k <= n; ++k) r *= q[k];
    return r;
  }
  // far tail: the scaled asymptotic series has converged well below 1e-12
  return asym_scaled_i(n, rho) / asym_scaled_i(0, rho);
}

}  // namespace simplexdir

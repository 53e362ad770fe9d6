#include <doctest.h>

#include <cmath>

#include "simplexdir/bessel.hpp"
#include "simplexdir/circular.hpp"
#include "simplexdir/special.hpp"
#include "test_oracles.hpp"

using namespace simplexdir;

TEST_CASE("arctan_star branch values") {
  CHECK(arctan_star(1.0, 0.0) == doctest::Approx(0.0));
  CHECK(arctan_star(0.0, -1.0) == doctest::Approx(1.5 * std::numbers::pi));
  // (-1, 1): 3pi/4, and r (cos, sin) round-trips to the input with r = sqrt(2)
  const double a = arctan_star(-1.0, 1.0);
  CHECK(a == doctest::Approx(0.75 * std::numbers::pi));
  const double r = std::hypot(-1.0, 1.0);
  CHECK(r * std::cos(a) == doctest::Approx(-1.0));
  CHECK(r * std::sin(a) == doctest::Approx(1.0));
  CHECK_THROWS_AS(arctan_star(0.0, 0.0), std::domain_error);
}

TEST_CASE("arctan_star round trip") {
  Rng rng(1);
  for (int i = 0; i < 5000; ++i) {
    const double y = rng.uniform(0.0, kTwoPi);
    const double rr = std::exp(rng.uniform(-3.0, 3.0));
    const double back = arctan_star(rr * std::cos(y), rr * std::sin(y));
    CHECK(circular_distance(back, y) < 1e-12);
  }
}

TEST_CASE("bessel ratio against the integral definition") {
  CHECK(bessel_i_ratio(1, 0.0) == 0.0);
  CHECK_THROWS_AS(bessel_i_ratio(1, -0.5), std::domain_error);

  // frozen quadrature values
  CHECK(bessel_i_ratio(1, 1.0) == doctest::Approx(0.44638996589653).epsilon(1e-10));
  CHECK(bessel_i_ratio(2, 5.0) == doctest::Approx(0.64264674518237).epsilon(1e-10));
  // live oracle
  for (auto [n, rho] : {std::pair{1, 1.0}, {2, 5.0}, {1, 0.3}, {2, 12.0}, {1, 30.0}}) {
    const double q = oracles::bessel_quadrature(n, rho) / oracles::bessel_quadrature(0, rho);
    CHECK(bessel_i_ratio(n, rho) == doctest::Approx(q).epsilon(1e-10));
  }
}

TEST_CASE("bessel ratio monotone and bounded") {
  double prev = 0.0;
  for (double rho = 0.1; rho <= 50.0; rho += 0.5) {
    const double v = bessel_i_ratio(1, rho);
    CHECK(v > prev);
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    prev = v;
  }
}

TEST_CASE("I_{-1} equals I_1") {
  for (double rho : {0.2, 1.0, 7.0, 40.0, 200.0, 1000.0})
    CHECK(bessel_i_ratio(-1, rho) == doctest::Approx(bessel_i_ratio(1, rho)).epsilon(1e-12));
}

TEST_CASE("von Mises log density") {
  // rho = 0 is uniform
  CHECK(vm_log_density(1.234, {Angle(0.5), 0.0}) ==
        doctest::Approx(std::log(1.0 / kTwoPi)).epsilon(1e-14));
  // symmetric about the mean
  const VonMisesParams p{Angle(2.1), 3.7};
  for (double d : {0.1, 0.5, 2.0})
    CHECK(vm_log_density(2.1 + d, p) == doctest::Approx(vm_log_density(2.1 - d, p)));
  // mode value with the quadrature oracle for I_0(5)
  const double i05 = oracles::bessel_quadrature(0, 5.0);
  CHECK(vm_log_density(std::numbers::pi, {Angle(std::numbers::pi), 5.0}) ==
        doctest::Approx(5.0 - std::log(kTwoPi * i05)).epsilon(1e-10));
}

TEST_CASE("von Mises density normalizes") {
  Rng rng(2);
  for (int rep = 0; rep < 10; ++rep) {
    const VonMisesParams p{Angle(rng.uniform(0.0, kTwoPi)), std::exp(rng.uniform(-2.0, 3.0))};
    const double total =
        oracles::periodic_integral([&](double y) { return std::exp(vm_log_density(y, p)); });
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("von Mises sampling moments") {
  Rng rng(3);
  const int n = 100000;
  {
    std::vector<double> ys(n);
    for (int i = 0; i < n; ++i) ys[i] = vm_sample({Angle(1.0), 0.0}, rng);
    CHECK(circular_summary(ys).variance == doctest::Approx(1.0).epsilon(0.02));
  }
  {
    std::vector<double> ys(n);
    for (int i = 0; i < n; ++i) ys[i] = vm_sample({Angle(std::numbers::pi), 5.0}, rng);
    const auto s = circular_summary(ys);
    CHECK(circular_distance(s.mean.value(), std::numbers::pi) < 0.02);
  }
  {
    std::vector<double> ys(n);
    for (int i = 0; i < n; ++i) ys[i] = vm_sample({Angle(std::numbers::pi / 2), 10.0}, rng);
    const auto s = circular_summary(ys);
    CHECK(1.0 - s.variance == doctest::Approx(bessel_i_ratio(1, 10.0)).epsilon(0.01));
  }
}

TEST_CASE("projected normal density") {
  // mu = 0 is uniform
  Pn2Params p0;
  p0.mu = Eigen::Vector2d::Zero();
  for (double y : {0.0, 1.0, 4.0}) CHECK(pn2_density(y, p0) == doctest::Approx(1.0 / kTwoPi));

  // normalization at random parameters
  Rng rng(4);
  for (int rep = 0; rep < 8; ++rep) {
    Pn2Params p;
    const double mu0 = rng.uniform(0.0, 4.0);
    const double alpha = rng.uniform(0.0, kTwoPi);
    p.mu = mu0 * Eigen::Vector2d(std::cos(alpha), std::sin(alpha));
    p.sigma = std::exp(rng.uniform(-1.0, 1.0));
    const double total =
        oracles::periodic_integral([&](double y) { return pn2_density(y, p); });
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  }

  // closed form vs radial quadrature at the spec point
  Pn2Params p;
  p.mu = 2.0 * Eigen::Vector2d(std::cos(1.0), std::sin(1.0));
  p.sigma = 1.0;
  const double quad = oracles::pn2_radial_quadrature(1.5, p.mu.x(), p.mu.y(), 1.0);
  CHECK(pn2_density(1.5, p) == doctest::Approx(quad).epsilon(1e-6));
}

TEST_CASE("projected normal circular variance") {
  Pn2Params p;
  p.mu = Eigen::Vector2d::Zero();
  CHECK(pn2_circular_variance(p) == 1.0);
  p.mu = Eigen::Vector2d(50.0, 0.0);
  p.sigma = 1.0;
  CHECK(pn2_circular_variance(p) < 0.01);

  // MC oracle through bivariate normal + arctan*
  p.mu = Eigen::Vector2d(2.0, 0.0);
  Rng rng(5);
  const int n = 1000000;
  double c = 0.0, s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = arctan_star(2.0 + rng.normal(), rng.normal());
    c += std::cos(y);
    s += std::sin(y);
  }
  const double mc_var = 1.0 - std::hypot(c, s) / n;
  CHECK(pn2_circular_variance(p) == doctest::Approx(mc_var).epsilon(0.005));

  // invariant to the mean angle
  double lo = 2.0, hi = 0.0;
  for (int r = 0; r < 8; ++r) {
    Pn2Params q;
    const double a = r * kTwoPi / 8.0;
    q.mu = 2.0 * Eigen::Vector2d(std::cos(a), std::sin(a));
    const double v = pn2_circular_variance(q);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi - lo < 1e-12);
}

TEST_CASE("circular summary") {
  {
    const double th = 0.7;
    std::vector<double> ys{th, kTwoPi - th};
    const auto s = circular_summary(ys);
    CHECK(circular_distance(s.mean.value(), 0.0) < 1e-12);
    CHECK(s.variance == doctest::Approx(1.0 - std::cos(th)).epsilon(1e-12));
  }
  {
    std::vector<double> ys{2.5, 2.5, 2.5};
    const auto s = circular_summary(ys);
    CHECK(s.mean.value() == doctest::Approx(2.5));
    CHECK(s.variance == doctest::Approx(0.0).epsilon(1e-12));
  }
  {
    Rng rng(6);
    std::vector<double> ys(100000);
    for (auto& y : ys) y = vm_sample({Angle(std::numbers::pi / 2), 5.0}, rng);
    CHECK(std::abs(circular_summary(ys).variance - (1.0 - bessel_i_ratio(1, 5.0))) < 0.01);
  }
  CHECK_THROWS_AS(circular_summary(std::vector<double>{}), std::domain_error);
  // antipodal pair: zero resultant reported as the degenerate convention
  std::vector<double> anti{0.0, std::numbers::pi};
  const auto s = circular_summary(anti);
  CHECK(s.degenerate);
  CHECK(s.mean.value() == doctest::Approx(std::numbers::pi));
  CHECK(s.variance == doctest::Approx(1.0));
}

TEST_CASE("circular summary variance stays in [0, 1]") {
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 1 + static_cast<int>(rng.uniform() * 20);
    std::vector<double> ys(n);
    for (auto& y : ys) y = rng.uniform(0.0, kTwoPi);
    const auto s = circular_summary(ys);
    CHECK(s.variance >= 0.0);
    CHECK(s.variance <= 1.0);
  }
}

TEST_CASE("circular correlation") {
  Rng rng(8);
  std::vector<double> a(5000);
  for (auto& y : a) y = vm_sample({Angle(1.0), 2.0}, rng);
  CHECK(circular_correlation(a, a) == doctest::Approx(1.0).epsilon(1e-12));

  // independent uniform pairs
  std::vector<double> u(100000), v(100000);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = rng.uniform(0.0, kTwoPi);
    v[i] = rng.uniform(0.0, kTwoPi);
  }
  CHECK(std::abs(circular_correlation(u, v)) < 0.02);

  // reflection flips the sign exactly
  std::vector<double> b(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) b[i] = wrap_angle(2.0 * 0.8 - a[i] + 0.3);
  CHECK(circular_correlation(a, b) == doctest::Approx(-1.0).epsilon(1e-9));

  std::vector<double> short_b(a.begin(), a.begin() + 10);
  CHECK_THROWS_AS(circular_correlation(a, short_b), std::domain_error);
}

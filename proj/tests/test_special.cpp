#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "simplexdir/angle.hpp"
#include "simplexdir/rng.hpp"
#include "simplexdir/special.hpp"
#include "test_oracles.hpp"

using namespace simplexdir;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("normal cdf basics") {
  CHECK(norm_cdf(0.0) == doctest::Approx(0.5));
  CHECK(norm_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
  CHECK(norm_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(kTwoPi)));
}

TEST_CASE("bivariate normal upper probability vs quadrature") {
  auto one = [](double, double) { return 1.0; };
  for (double r : {0.0, 0.15, 0.5, -0.6, 0.85, 0.93, -0.96}) {
    for (auto [h, k] : {std::pair{0.3, -0.4}, {-1.0, 1.2}, {0.0, 0.0}, {1.5, 0.7}}) {
      const double q = oracles::bvn_quadrature(h, 9.0, k, 9.0, r, one, 40);
      CHECK(std::abs(bvn_upper(h, k, r) - q) < 1e-8);
    }
  }
  // symmetry and marginal limits
  CHECK(bvn_upper(0.4, -0.9, 0.6) == doctest::Approx(bvn_upper(-0.9, 0.4, 0.6)).epsilon(1e-12));
  CHECK(bvn_upper(-kInf, 0.7, 0.3) == doctest::Approx(norm_cdf(-0.7)));
  CHECK(bvn_upper(kInf, 0.7, 0.3) == 0.0);
  CHECK(bvn_upper(0.5, 0.5, 1.0) == doctest::Approx(norm_cdf(-0.5)));
}

TEST_CASE("rectangle moments vs quadrature") {
  auto xfun = [](double x, double) { return x; };
  auto xyfun = [](double x, double y) { return x * y; };
  for (double s : {0.5, -0.8, 0.9, 0.2, -0.35}) {
    for (double z : {0.5, 1.0, 2.0}) {
      const double m10 = bvn_rect_m10(-z, z, z, kInf, s);
      const double q10 = oracles::bvn_quadrature(-z, z, z, 9.5, s, xfun, 40);
      CHECK(std::abs(m10 - q10) < 1e-8);
      const double m11 = bvn_rect_m11(-z, z, -z, z, s);
      const double q11 = oracles::bvn_quadrature(-z, z, -z, z, s, xyfun, 40);
      CHECK(std::abs(m11 - q11) < 1e-8);
    }
  }
  CHECK_THROWS_AS(bvn_rect_m10(-1, 1, -1, 1, 1.0), std::domain_error);
}

TEST_CASE("kolmogorov-smirnov p-value behaviour") {
  Rng rng(12);
  {
    std::vector<double> u(20000);
    for (auto& x : u) x = rng.uniform();
    CHECK(ks_test_pvalue(u) > 0.001);
  }
  {
    std::vector<double> u(20000);
    for (auto& x : u) x = 0.5 * rng.uniform();  // wrong law
    CHECK(ks_test_pvalue(u) < 1e-6);
  }
}

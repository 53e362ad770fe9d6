#include <doctest.h>

#include <cmath>

#include "simplexdir/bessel.hpp"
#include "simplexdir/theory.hpp"
#include "test_oracles.hpp"

using namespace simplexdir;

TEST_CASE("homogeneous-model prior moments") {
  // beta -> 0 limit
  CHECK(svm_prior_moments(0.0, 1.0, 1.0, 5.0).variance == doctest::Approx(1.0));
  // both concentrations large
  CHECK(svm_prior_moments(2.0 * std::sqrt(500.0), 0.3, 1.0, 500.0).variance < 0.01);
  // the mean is the GP mean angle
  CHECK(svm_prior_moments(2.0, 1.0, 1.0, 5.0).mean.value() == doctest::Approx(1.0));

  // MC over the generative path: m ~ PN2, y ~ vM(m, rho)
  McGenerator gen;
  gen.kind = McGenerator::Kind::Svm;
  gen.pn2.mu = 2.0 * Eigen::Vector2d(std::cos(1.0), std::sin(1.0));
  gen.pn2.sigma = 1.0;
  gen.svm_rho = 5.0;
  Rng rng(41);
  const auto mc = mc_moment_oracle(gen, 1000000, rng);
  const auto th = svm_prior_moments(2.0, 1.0, 1.0, 5.0);
  CHECK(std::abs(th.variance - mc.summary.variance) < 0.005);
  CHECK(circular_distance(th.mean.value(), mc.summary.mean.value()) < 0.01);
}

TEST_CASE("mixing-probability model prior moments") {
  // single component
  {
    const double m = 2.2, rho = 3.0, p = 1.0;
    const auto mm = svmp_prior_moments({&m, 1}, {&rho, 1}, {&p, 1});
    CHECK(mm.mean.value() == doctest::Approx(2.2));
    CHECK(mm.variance == doctest::Approx(1.0 - bessel_i_ratio(1, 3.0)).epsilon(1e-12));
  }
  // equal concentration, equal probability: angular midpoint on the short arc
  {
    std::vector<double> ms{1.0, 2.0}, rhos{4.0, 4.0}, ps{0.5, 0.5};
    CHECK(svmp_prior_moments(ms, rhos, ps).mean.value() == doctest::Approx(1.5).epsilon(1e-12));
  }
  // MC against the paper-style configuration
  {
    std::vector<double> ms{std::numbers::pi / 2, 3 * std::numbers::pi / 2};
    std::vector<double> rhos{5.0, 10.0}, ps{0.3, 0.7};
    McGenerator gen;
    gen.kind = McGenerator::Kind::SvmpMixture;
    gen.ms = ms;
    gen.rhos = rhos;
    gen.probs = ps;
    Rng rng(42);
    const auto mc = mc_moment_oracle(gen, 1000000, rng);
    const auto th = svmp_prior_moments(ms, rhos, ps);
    CHECK(std::abs(th.variance - mc.summary.variance) < 0.005);
    CHECK(circular_distance(th.mean.value(), mc.summary.mean.value()) < 0.005);
  }
}

TEST_CASE("mixing-probability model prior correlation") {
  std::vector<double> ms{std::numbers::pi / 2, 3 * std::numbers::pi / 2};
  std::vector<double> rhos{4.0, 4.0};

  SUBCASE("independent joint gives zero") {
    Eigen::Vector2d p(0.35, 0.65);
    Eigen::MatrixXd joint = p * p.transpose();
    CHECK(std::abs(svmp_prior_correlation(ms, rhos, joint).value) < 1e-12);
  }
  SUBCASE("always-same-component joint is positively correlated") {
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(2, 2);
    joint(0, 0) = 0.5;
    joint(1, 1) = 0.5;
    const auto corr = svmp_prior_correlation(ms, rhos, joint);
    CHECK(corr.value > 0.0);
    // cross-check by MC with common labels
    McPairGenerator pg;
    pg.kind = McPairGenerator::Kind::SvmpJointLabels;
    pg.ms = ms;
    pg.rhos = rhos;
    pg.joint = joint;
    Rng rng(43);
    std::vector<double> ps{0.5, 0.5};
    const double alpha = svmp_prior_moments(ms, rhos, ps).mean.value();
    const auto mc = mc_pair_correlation(pg, alpha, alpha, 500000, rng);
    CHECK(std::abs(mc.value - corr.value) < 5.0 * std::max(mc.se, 1e-3));
  }
  SUBCASE("single component is flagged degenerate") {
    std::vector<double> m1{1.0}, r1{2.0};
    Eigen::MatrixXd joint = Eigen::MatrixXd::Constant(1, 1, 1.0);
    const auto corr = svmp_prior_correlation(m1, r1, joint);
    CHECK(corr.degenerate);
    CHECK(corr.value == 0.0);
  }
  SUBCASE("invalid joint is rejected") {
    Eigen::MatrixXd joint = Eigen::MatrixXd::Constant(2, 2, 0.4);
    CHECK_THROWS_AS(svmp_prior_correlation(ms, rhos, joint), std::domain_error);
  }
}

TEST_CASE("two-component equally-favored moments") {
  // degenerate to one von Mises
  {
    const auto mm = svmp2_prior_moments(2.0, 2.0, 3.0, 3.0);
    CHECK(mm.mean.value() == doctest::Approx(2.0));
    CHECK(mm.variance == doctest::Approx(1.0 - bessel_i_ratio(1, 3.0)).epsilon(1e-12));
  }
  // antipodal components cancel the resultant
  {
    const auto mm = svmp2_prior_moments(0.5, 0.5 + std::numbers::pi, 2.0, 2.0);
    CHECK(mm.variance == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mm.degenerate_mean);
  }
  // MC with the logistic-latent generative draw
  {
    McGenerator gen;
    gen.kind = McGenerator::Kind::Svmp2;
    gen.ms = {std::numbers::pi / 2, 3 * std::numbers::pi / 2};
    gen.rhos = {1.0, 1.0};
    Rng rng(44);
    const auto mc = mc_moment_oracle(gen, 1000000, rng);
    const auto th = svmp2_prior_moments(gen.ms[0], gen.ms[1], 1.0, 1.0);
    CHECK(std::abs(th.variance - mc.summary.variance) < 0.005);
  }
}

TEST_CASE("logistic expectation is one half") {
  CHECK(logistic_expectation() == 0.5);
  Rng rng(45);
  double acc = 0.0;
  const int n = 10000000;
  for (int i = 0; i < n; ++i) acc += inverse_logit(rng.normal());
  CHECK(std::abs(acc / n - 0.5) < 0.001);
  // any zero-mean normal scale by odd symmetry
  acc = 0.0;
  for (int i = 0; i < 1000000; ++i) acc += inverse_logit(3.0 * rng.normal());
  CHECK(std::abs(acc / 1000000 - 0.5) < 0.002);
}

TEST_CASE("truncated bivariate expectations") {
  SUBCASE("vanishing correlation limit") {
    const auto t = truncated_bivariate_terms({1e-8, 1.0});
    CHECK(std::abs(t.e_one) < 1e-8);
    CHECK(std::abs(t.e_two) < 1e-8);
  }
  SUBCASE("closed form matches 2-D quadrature") {
    const auto t = truncated_bivariate_terms({0.5, 1.0});
    auto xfun = [](double x, double) { return x; };
    auto xyfun = [](double x, double y) { return x * y; };
    const double q1 = oracles::bvn_quadrature(-1.0, 1.0, 1.0, 9.5, 0.5, xfun, 40);
    const double q2 = oracles::bvn_quadrature(-1.0, 1.0, -1.0, 1.0, 0.5, xyfun, 40);
    CHECK(std::abs(t.e_one - q1) < 1e-8);
    CHECK(std::abs(t.e_two - q2) < 1e-8);
  }
  SUBCASE("matches MC at strong correlation") {
    const auto t = truncated_bivariate_terms({0.9, 2.0});
    Rng rng(46);
    const double sb = std::sqrt(1.0 - 0.81);
    double s1 = 0.0, s2 = 0.0, ss1 = 0.0, ss2 = 0.0;
    const int n = 10000000;
    for (int i = 0; i < n; ++i) {
      const double a = rng.normal();
      const double b = 0.9 * a + sb * rng.normal();
      const double v1 = (std::abs(a) <= 2.0 && b > 2.0) ? a : 0.0;
      const double v2 = (std::abs(a) <= 2.0 && std::abs(b) <= 2.0) ? a * b : 0.0;
      s1 += v1;
      s2 += v2;
      ss1 += v1 * v1;
      ss2 += v2 * v2;
    }
    const double m1 = s1 / n, m2 = s2 / n;
    const double se1 = std::sqrt((ss1 / n - m1 * m1) / n);
    const double se2 = std::sqrt((ss2 / n - m2 * m2) / n);
    CHECK(std::abs(t.e_one - m1) < 3.0 * se1);
    CHECK(std::abs(t.e_two - m2) < 3.0 * se2);
  }
  CHECK_THROWS_AS(truncated_bivariate_terms({1.0, 1.0}), std::domain_error);
}

TEST_CASE("logistic product bounds") {
  SUBCASE("independence gives one quarter") {
    const auto b = logistic_product_bounds({0.0, 2.0});
    CHECK(b.f_product_expectation == doctest::Approx(0.25));
  }
  SUBCASE("MC sandwich at the spec point") {
    const auto b = logistic_product_bounds({0.5, 2.0});
    Rng rng(47);
    const auto mc = mc_logistic_product(0.5, 10000000, rng);
    CHECK(b.lower <= mc.value + 3.0 * mc.se);
    CHECK(mc.value - 3.0 * mc.se <= b.upper);
  }
  SUBCASE("bound width shrinks toward z_eps = 2") {
    const auto b2 = logistic_product_bounds({0.5, 2.0});
    const auto b05 = logistic_product_bounds({0.5, 0.5});
    CHECK(b2.upper - b2.lower < b05.upper - b05.lower);
  }
}

TEST_CASE("mc moment oracle sanity") {
  Rng rng(48);
  {
    McGenerator gen;
    gen.kind = McGenerator::Kind::VonMises;
    gen.vm = {Angle(std::numbers::pi), 5.0};
    const auto mc = mc_moment_oracle(gen, 400000, rng);
    CHECK(std::abs(mc.summary.variance - (1.0 - bessel_i_ratio(1, 5.0))) < 0.01);
  }
  {
    McGenerator gen;
    gen.kind = McGenerator::Kind::Uniform;
    const auto mc = mc_moment_oracle(gen, 400000, rng);
    CHECK(mc.summary.variance > 0.99);
  }
  {
    // two nearby locations: positive empirical correlation numerator
    McPairGenerator pg;
    pg.kind = McPairGenerator::Kind::SvmPair;
    pg.base.mu = Eigen::Vector2d(1.0, 0.0);
    pg.base.sigma = 0.5;
    pg.corr = 0.95;
    pg.rho = 3.0;
    const auto mc = mc_pair_correlation(pg, 0.0, 0.0, 400000, rng);
    CHECK(mc.numerator > 0.0);
    CHECK(mc.value > 0.0);
  }
}

TEST_CASE("Kendall consistency at large concentration") {
  // with the observation noise killed, the variance reduces to the projected
  // normal's
  Pn2Params pn;
  pn.mu = Eigen::Vector2d(1.2, 0.9);
  pn.sigma = 0.7;
  const auto th = svm_prior_moments(pn.mu0(), pn.alpha_mu().value(), 0.7, 1e6);
  CHECK(std::abs(th.variance - pn2_circular_variance(pn)) < 1e-6);
}

#ifndef SIMPLEXDIR_SPECIAL_HPP_
#define SIMPLEXDIR_SPECIAL_HPP_

#include <span>

namespace simplexdir {

double norm_pdf(double x);
double norm_cdf(double x);

// P(X > h, Y > k) for a standard bivariate normal with correlation r.
double bvn_upper(double h, double k, double r);

// P(a1 <= X <= b1, a2 <= Y <= b2); bounds may be +-infinity.
double bvn_rect_prob(double a1, double b1, double a2, double b2, double r);

// E[X 1{rect}] and E[X Y 1{rect}] over the same rectangle.
double bvn_rect_m10(double a1, double b1, double a2, double b2, double r);
double bvn_rect_m11(double a1, double b1, double a2, double b2, double r);

// Asymptotic one-sample Kolmogorov-Smirnov p-value. `u` holds the CDF-
// transformed sample (values in [0,1]); it is sorted internally.
double ks_test_pvalue(std::span<const double> u);

}  // namespace simplexdir

#endif

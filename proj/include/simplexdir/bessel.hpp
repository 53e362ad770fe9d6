#ifndef SIMPLEXDIR_BESSEL_HPP_
#define SIMPLEXDIR_BESSEL_HPP_

namespace simplexdir {

// Modified Bessel function of the first kind, integer order n >= 0,
// scaled by exp(-x). Power series for x <= 15, asymptotic expansion above.
double bessel_i_scaled(int n, double x);

// log I_0(x), safe for large x.
double log_bessel_i0(double x);

// I_n(rho) / I_0(rho). Negative n is mapped through I_{-n} = I_n.
// Power series below 15, scaled backward recurrence above. Domain error
// for rho < 0.
double bessel_i_ratio(int n, double rho);

}  // namespace simplexdir

#endif

#pragma once

#include <functional>
#include <limits>

namespace neckforge::special {

// Quadrature request for a 1-D integral whose integrand may blow up like
// (x-lo)^p with p in (-1,0] at the lower endpoint.  hi may be +infinity;
// tails are assumed to decay exponentially.
struct QuadratureSpec {
  std::function<double(double)> integrand;
  double lo = 0.0;
  double hi = 1.0;
  double singularity_exponent_lo = 0.0;
  double tol = 1e-12;
};

double integrate_singular(const QuadratureSpec& spec);

// Adaptive Gauss-Kronrod on a finite interval with a smooth integrand.
double integrate_smooth(const std::function<double(double)>& f, double lo,
                        double hi, double tol);

struct BesselOrder {
  double nu;  // in (0,1); the neck operators use nu = 1/(n+1)
};

// Modified Bessel functions of real order.  bessel_i accepts any order
// > -1; bessel_k any order (even in its order).  x must be positive.
double bessel_i(BesselOrder order, double x);
double bessel_k(BesselOrder order, double x);
double bessel_i_prime(BesselOrder order, double x);
double bessel_k_prime(BesselOrder order, double x);

double gamma_fn(double x);
double log_gamma(double x);
double beta_fn(double a, double b);

// c(n) = integral over (0,inf) of (e^s - 1)^(-1/(n+1)); computed by
// quadrature.  Closed form pi/sin(pi/(n+1)) is kept in the tests as the
// independent oracle.
double c_n(int n, double tol = 1e-12);

// The unique c1 > 0 with \int_{-c1}^0 e^{-s/(n+1)} ds = n+1.
double c_1_const(int n);

// d(n) = (n/(n+1))^{1/n} c(n)^{(n+1)/n}.
double d_n(int n, double tol = 1e-12);

// lambda(n) = sqrt(4 n d(n)) / (n+1), the frequency of the Bessel-type
// fundamental solutions at the s -> 0 endpoint.
double lambda_n(int n, double tol = 1e-12);

}  // namespace neckforge::special

// Special functions used by the channel models.
//
// Every routine here is a pure function of its arguments. Algorithms switch
// between a convergent series and an asymptotic or continued-fraction form;
// the crossover points are listed next to each declaration.
#pragma once

#include <stdexcept>

namespace uavfso::specfun {

class DomainError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
double q_function(double x);

/// Complementary error function (delegates to <cmath>).
double erfc(double x);

/// Scaled complementary error function exp(x^2) erfc(x).
/// Direct product for x <= 20, Lentz continued fraction above.
double erfcx(double x);

/// Non-regularized upper incomplete Gamma function Γ(s, x).
/// Series for x < s + 1, continued fraction otherwise.
double gamma_upper(double s, double x);

/// Non-regularized lower incomplete Gamma function Υ(s, x).
double gamma_lower(double s, double x);

/// Regularized P(s, x) and Q(s, x) = 1 - P(s, x).
double gamma_p(double s, double x);
double gamma_q(double s, double x);

/// Modified Bessel function of the first kind, order zero.
/// Power series for x <= 15, Hankel asymptotic expansion above.
double bessel_i0(double x);

/// exp(-|x|) I0(x), finite for all x.
double bessel_i0e(double x);

/// Bessel functions of the first kind, orders zero and one.
/// Power series for |x| <= 8, Miller backward recurrence up to 25, Hankel
/// asymptotic expansion above.
double bessel_j0(double x);
double bessel_j1(double x);

/// Modified Bessel function of the second kind K_nu(x) for real nu, x > 0.
/// Temme series for x <= 2, Steed continued fraction above; forward
/// recurrence from the fractional order.
double bessel_k(double nu, double x);

/// Partial sum of the reflection-formula series
///   K_nu(z) = pi / (2 sin(pi nu)) * sum_{m=0}^{M} [ (z/2)^{2m-nu} / (Γ(m-nu+1) m!)
///                                              - (z/2)^{2m+nu} / (Γ(m+nu+1) m!) ]
/// Throws DomainError for integer nu.
double bessel_k_series(double nu, double z, int terms);

/// First-order Marcum Q-function Q1(a, b), computed as a Poisson mixture of
/// regularized upper incomplete Gamma functions.
double marcum_q1(double a, double b);

}  // namespace uavfso::specfun

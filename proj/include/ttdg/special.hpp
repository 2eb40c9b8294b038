#pragma once

namespace ttdg {

/// Gamma function (Lanczos approximation, reflection below 1/2).
double gamma_fn(double x);

/// Bessel function of the first kind J_nu(x) by its ascending series,
/// summed in extended precision. Intended for 0 <= x <= 40, nu >= 0.
double bessel_j(double nu, double x);

/// Derivative J_nu'(x) = (nu / x) J_nu(x) - J_{nu+1}(x).
double bessel_j_prime(double nu, double x);

}  // namespace ttdg

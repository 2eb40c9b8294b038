#include "ttdg/special.hpp"

#include <cmath>
#include <numbers>

#include "ttdg/error.hpp"

namespace ttdg {

double gamma_fn(double x) {
  if (x < 0.5) {
    // reflection formula
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
  }
  static constexpr double g = 7.0;
  static constexpr double coef[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                     771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                     -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  x -= 1.0;
  double a = coef[0];
  const double t = x + g + 0.5;
  for (int i = 1; i < 9; ++i) a += coef[i] / (x + i);
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double bessel_j(double nu, double x) {
  if (nu < 0.0) throw Error(ErrorKind::InvalidArgument, "bessel_j needs nu >= 0");
  if (x < 0.0) throw Error(ErrorKind::InvalidArgument, "bessel_j needs x >= 0");
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  using ld = long double;
  const ld half = static_cast<ld>(x) / 2;
  const ld q = -half * half;
  // first term (x/2)^nu / Gamma(nu + 1), then the ratio recurrence
  ld term = std::pow(half, static_cast<ld>(nu)) / static_cast<ld>(gamma_fn(nu + 1.0));
  ld sum = term;
  for (int m = 1; m < 500; ++m) {
    term *= q / (static_cast<ld>(m) * (m + static_cast<ld>(nu)));
    sum += term;
    if (std::abs(term) < 1e-18L * std::abs(sum) && m > half) break;
  }
  return static_cast<double>(sum);
}

double bessel_j_prime(double nu, double x) {
  if (x == 0.0) {
    if (nu == 1.0) return 0.5;
    if (nu == 0.0 || nu > 1.0) return 0.0;
    return HUGE_VAL;
  }
  return nu / x * bessel_j(nu, x) - bessel_j(nu + 1.0, x);
}

}  // namespace ttdg

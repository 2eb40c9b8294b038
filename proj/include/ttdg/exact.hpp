#pragma once

#include <array>
#include <memory>
#include <string>

#include "ttdg/dg.hpp"

namespace ttdg {

/// A named field with U, v = dU/dt and sigma = -grad U.
class ExactSolution : public Field {
 public:
  explicit ExactSolution(std::string name, int n) : name_(std::move(name)), n_(n) {}
  const std::string& name() const { return name_; }
  int dim() const { return n_; }

 private:
  std::string name_;
  int n_;
};

using ExactPtr = std::shared_ptr<const ExactSolution>;

/// U = prod cos(pi x_i) sin(pi t c sqrt(n)) / (sqrt(n) pi).
ExactPtr standing_wave(int n, double c = 1.0);

/// U = sin(pi x) sin(pi t) on [0, 1], c = 1.
ExactPtr sine_wave_1d();

/// U = cos(a t) sin(nu phi) J_nu(a r), polar coordinates about the origin
/// with phi in [0, 2 pi).
ExactPtr bessel_singular(double a = 10.0, double nu = 2.0 / 3.0);

/// Time-independent initial data U0 = exp(-|x - x0|^2 / delta^2), v0 = 0,
/// sigma0 = -grad U0.
ExactPtr gaussian_pulse(std::array<double, 2> x0 = {1.0, 1.0}, double delta = 0.01);

/// U = |x|^2 + n c^2 t^2, a polynomial solution of degree two.
ExactPtr quadratic_wave(int n, double c = 1.0);

/// Constant state v = value, sigma = 0, U = value t.
ExactPtr constant_state(int n, double value = 1.0);

/// Zero in every component.
ExactPtr zero_solution(int n);

/// Builds one of the above by name (standing, sine, bessel, gaussian,
/// quadratic, constant, zero).
ExactPtr make_exact(const std::string& name, int n, double c = 1.0);

}  // namespace ttdg

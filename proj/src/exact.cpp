#include "ttdg/exact.hpp"

#include <cmath>
#include <numbers>

#include "ttdg/special.hpp"

namespace ttdg {

namespace {

constexpr double pi = std::numbers::pi;

class StandingWave final : public ExactSolution {
 public:
  StandingWave(int n, double c) : ExactSolution("standing", n), c_(c), omega_(pi * c * std::sqrt(double(n))) {}
  FieldValue eval(std::span<const double> x, double t) const override {
    const int n = dim();
    std::array<double, 3> co{}, si{};
    double prod = 1.0;
    for (int d = 0; d < n; ++d) {
      co[d] = std::cos(pi * x[d]);
      si[d] = std::sin(pi * x[d]);
      prod *= co[d];
    }
    const double scale = 1.0 / (std::sqrt(double(n)) * pi);
    FieldValue f;
    f.U = prod * std::sin(omega_ * t) * scale;
    f.v = prod * std::cos(omega_ * t) * omega_ * scale;
    for (int d = 0; d < n; ++d) {
      double others = 1.0;
      for (int e = 0; e < n; ++e) {
        if (e != d) others *= co[e];
      }
      f.sigma[d] = pi * si[d] * others * std::sin(omega_ * t) * scale;
    }
    return f;
  }

 private:
  double c_;
  double omega_;
};

class SineWave final : public ExactSolution {
 public:
  SineWave() : ExactSolution("sine", 1) {}
  FieldValue eval(std::span<const double> x, double t) const override {
    FieldValue f;
    f.U = std::sin(pi * x[0]) * std::sin(pi * t);
    f.v = pi * std::sin(pi * x[0]) * std::cos(pi * t);
    f.sigma[0] = -pi * std::cos(pi * x[0]) * std::sin(pi * t);
    return f;
  }
};

class BesselSingular final : public ExactSolution {
 public:
  BesselSingular(double a, double nu) : ExactSolution("bessel", 2), a_(a), nu_(nu) {
    if (!(a > 0.0) || !(nu > 0.0)) throw Error(ErrorKind::InvalidArgument, "bessel solution needs a > 0 and nu > 0");
  }
  FieldValue eval(std::span<const double> x, double t) const override {
    FieldValue f;
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0) return f;
    double phi = std::atan2(x[1], x[0]);
    if (phi < 0.0) phi += 2.0 * pi;
    const double j = bessel_j(nu_, a_ * r);
    const double jp = bessel_j_prime(nu_, a_ * r);
    const double s = std::sin(nu_ * phi);
    const double cphi = std::cos(nu_ * phi);
    f.U = std::cos(a_ * t) * s * j;
    f.v = -a_ * std::sin(a_ * t) * s * j;
    // grad U = cos(at) [a J' sin(nu phi) r_hat + (nu / r) J cos(nu phi) phi_hat]
    const double dr = a_ * jp * s;
    const double dphi = nu_ / r * j * cphi;
    const double ux = std::cos(phi), uy = std::sin(phi);
    f.sigma[0] = -std::cos(a_ * t) * (dr * ux - dphi * uy);
    f.sigma[1] = -std::cos(a_ * t) * (dr * uy + dphi * ux);
    return f;
  }

 private:
  double a_;
  double nu_;
};

class GaussianPulse final : public ExactSolution {
 public:
  GaussianPulse(std::array<double, 2> x0, double delta) : ExactSolution("gaussian", 2), x0_(x0), delta_(delta) {
    if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "pulse width must be positive");
  }
  FieldValue eval(std::span<const double> x, double) const override {
    FieldValue f;
    const double dx = x[0] - x0_[0], dy = x[1] - x0_[1];
    const double d2 = delta_ * delta_;
    f.U = std::exp(-(dx * dx + dy * dy) / d2);
    f.sigma[0] = 2.0 * dx / d2 * f.U;
    f.sigma[1] = 2.0 * dy / d2 * f.U;
    return f;
  }

 private:
  std::array<double, 2> x0_;
  double delta_;
};

class QuadraticWave final : public ExactSolution {
 public:
  QuadraticWave(int n, double c) : ExactSolution("quadratic", n), c_(c) {}
  FieldValue eval(std::span<const double> x, double t) const override {
    const int n = dim();
    FieldValue f;
    f.U = n * c_ * c_ * t * t;
    f.v = 2.0 * n * c_ * c_ * t;
    for (int d = 0; d < n; ++d) {
      f.U += x[d] * x[d];
      f.sigma[d] = -2.0 * x[d];
    }
    return f;
  }

 private:
  double c_;
};

class ConstantState final : public ExactSolution {
 public:
  ConstantState(int n, double value) : ExactSolution(value == 0.0 ? "zero" : "constant", n), value_(value) {}
  FieldValue eval(std::span<const double>, double t) const override {
    FieldValue f;
    f.v = value_;
    f.U = value_ * t;
    return f;
  }

 private:
  double value_;
};

void check_dim(int n) {
  if (n < 1 || n > 3) throw Error(ErrorKind::InvalidArgument, "space dimension must be 1, 2 or 3");
}

}  // namespace

ExactPtr standing_wave(int n, double c) {
  check_dim(n);
  return std::make_shared<StandingWave>(n, c);
}
ExactPtr sine_wave_1d() { return std::make_shared<SineWave>(); }
ExactPtr bessel_singular(double a, double nu) { return std::make_shared<BesselSingular>(a, nu); }
ExactPtr gaussian_pulse(std::array<double, 2> x0, double delta) { return std::make_shared<GaussianPulse>(x0, delta); }
ExactPtr quadratic_wave(int n, double c) {
  check_dim(n);
  return std::make_shared<QuadraticWave>(n, c);
}
ExactPtr constant_state(int n, double value) {
  check_dim(n);
  return std::make_shared<ConstantState>(n, value);
}
ExactPtr zero_solution(int n) { return constant_state(n, 0.0); }

ExactPtr make_exact(const std::string& name, int n, double c) {
  if (name == "standing") return standing_wave(n, c);
  if (name == "sine") return sine_wave_1d();
  if (name == "bessel") return bessel_singular();
  if (name == "gaussian") return gaussian_pulse();
  if (name == "quadratic") return quadratic_wave(n, c);
  if (name == "constant") return constant_state(n);
  if (name == "zero") return zero_solution(n);
  throw Error(ErrorKind::InvalidArgument, "unknown solution '" + name + "'");
}

}  // namespace ttdg

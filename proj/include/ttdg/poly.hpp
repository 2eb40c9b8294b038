#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ttdg/error.hpp"

namespace ttdg {

inline constexpr int kMaxSpaceDim = 3;

/// Exponents of a space-time monomial x_1^a_1 ... x_n^a_n t^k.
class MultiIndex {
 public:
  MultiIndex() = default;
  MultiIndex(std::span<const int> space, int time);
  static MultiIndex zero(int dim);

  int dim() const { return dim_; }
  int space(int m) const { return space_[m]; }
  int time() const { return time_; }
  int space_degree() const;
  int total_degree() const { return space_degree() + time_; }

  MultiIndex with_space(int m, int exponent) const;
  MultiIndex with_time(int exponent) const;

  bool operator==(const MultiIndex&) const = default;

 private:
  std::array<int, kMaxSpaceDim> space_{};
  int time_ = 0;
  int dim_ = 0;
};

/// Graded order: total degree first, then lexicographic on (space, time).
struct GradedOrder {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

/// Which variable to differentiate with respect to.
struct Axis {
  int index;
  static constexpr Axis time() { return {-1}; }
  static constexpr Axis space(int m) { return {m}; }
  constexpr bool is_time() const { return index < 0; }
};

/// Sparse polynomial in n space variables and time, stored on monomial
/// coefficients. Values are immutable once built; all operations return new
/// polynomials.
class SpaceTimePolynomial {
 public:
  using CoeffMap = std::map<MultiIndex, double, GradedOrder>;

  SpaceTimePolynomial() = default;
  explicit SpaceTimePolynomial(int dim, int degree_bound = 0);

  static SpaceTimePolynomial constant(int dim, double value);
  static SpaceTimePolynomial monomial(const MultiIndex& index, double coeff = 1.0);

  int dim() const { return dim_; }
  int degree_bound() const { return degree_bound_; }
  const CoeffMap& coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  bool is_zero() const { return coeffs_.empty(); }

  /// Coefficient of the given monomial, zero when absent.
  double coeff(const MultiIndex& index) const;
  double max_abs_coeff() const;
  /// Largest total degree among stored terms (0 for the zero polynomial).
  int actual_degree() const;

  /// Adds `value` to the coefficient of `index`, growing degree_bound when
  /// needed. Exact zeros are removed.
  void add_term(const MultiIndex& index, double value);

  double eval(std::span<const double> x, double t) const;

  SpaceTimePolynomial operator+(const SpaceTimePolynomial& other) const;
  SpaceTimePolynomial operator-(const SpaceTimePolynomial& other) const;
  SpaceTimePolynomial operator*(const SpaceTimePolynomial& other) const;
  SpaceTimePolynomial operator-() const;
  friend SpaceTimePolynomial operator*(double a, const SpaceTimePolynomial& p);

  std::string to_string() const;

 private:
  void normalize();

  int dim_ = 0;
  int degree_bound_ = 0;
  CoeffMap coeffs_;
};

SpaceTimePolynomial derive(const SpaceTimePolynomial& p, Axis axis);

/// -Laplace(p) + c^-2 d_tt p.
SpaceTimePolynomial wave_residual(const SpaceTimePolynomial& p, double c);

/// q(x, t) = p((x - x0) / h, c (t - t0) / h), expanded exactly.
SpaceTimePolynomial affine_map(const SpaceTimePolynomial& p,
                               std::span<const double> center_x,
                               double center_t, double h, double c);

/// Number of monomials of total degree <= degree in `vars` variables.
std::size_t count_monomials(int vars, int degree);

/// All multi-indices with space part of total degree <= degree (time = 0),
/// in graded lexicographic order.
std::vector<MultiIndex> space_indices(int dim, int degree);

/// All space-time multi-indices with total degree <= degree, graded order.
std::vector<MultiIndex> spacetime_indices(int dim, int degree);

}  // namespace ttdg

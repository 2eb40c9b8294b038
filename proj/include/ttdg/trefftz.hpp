#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ttdg/poly.hpp"

namespace ttdg {

enum class SeedKind { Monomial, Legendre, Chebyshev };

const char* to_string(SeedKind kind);
SeedKind parse_seed_kind(const std::string& name);
inline constexpr std::array<SeedKind, 3> kAllSeedKinds = {SeedKind::Monomial, SeedKind::Legendre,
                                                           SeedKind::Chebyshev};

/// dim U^p = C(p+n, n) + C(p-1+n, n).
std::size_t scalar_trefftz_dim(int p, int n);
/// dim W^p = dim U^{p+1} - 1.
std::size_t first_order_trefftz_dim(int p, int n);

/// Basis of the space polynomials of total degree <= degree. Legendre and
/// Chebyshev kinds are tensor products of the 1-D families on [-1, 1].
std::vector<SpaceTimePolynomial> seed_space_basis(SeedKind kind, int degree, int n);

/// Extends initial data U(., 0) = seed0, d_t U(., 0) = seed1 to the unique
/// polynomial solution of -Laplace U + c^-2 d_tt U = 0 of degree <= p.
SpaceTimePolynomial trefftz_extend(const SpaceTimePolynomial& seed0,
                                   const std::optional<SpaceTimePolynomial>& seed1, int p,
                                   double c);

struct ScalarTrefftzBasis {
  int p = 0;
  int n = 1;
  SeedKind seed = SeedKind::Monomial;
  std::vector<SpaceTimePolynomial> members;
  /// Index of the member extended from the constant seed with zero velocity.
  std::size_t constant_member = 0;
};

ScalarTrefftzBasis build_scalar_basis(int p, int n, SeedKind kind = SeedKind::Monomial);

/// One pair (v, sigma) = (d_t b, -grad b) together with its potential b.
struct FirstOrderMember {
  SpaceTimePolynomial v;
  std::vector<SpaceTimePolynomial> sigma;
  SpaceTimePolynomial potential;
};

struct FirstOrderTrefftzBasis {
  int p = 0;
  int n = 1;
  SeedKind seed = SeedKind::Monomial;
  std::vector<FirstOrderMember> members;
};

FirstOrderTrefftzBasis build_first_order_basis(int p, int n, SeedKind kind = SeedKind::Monomial);

/// Element center, anisotropic diameter and wavespeed of a localization.
struct Localization {
  std::array<double, kMaxSpaceDim> center_x{};
  double center_t = 0.0;
  double h = 1.0;
  double c = 1.0;
};

struct LocalScalarBasis {
  Localization where;
  std::vector<SpaceTimePolynomial> members;
};

struct LocalFirstOrderBasis {
  Localization where;
  /// v = c v_ref, sigma = sigma_ref, potential = h b_ref, all composed with
  /// the reference coordinates ((x - x0)/h, c (t - t0)/h).
  std::vector<FirstOrderMember> members;
};

LocalScalarBasis localize(const ScalarTrefftzBasis& basis, const Localization& where);
LocalFirstOrderBasis localize(const FirstOrderTrefftzBasis& basis, const Localization& where);

/// Values of every basis member at a batch of points: rows are members,
/// columns are points.
struct BasisValues {
  Eigen::MatrixXd v;
  std::array<Eigen::MatrixXd, kMaxSpaceDim> sigma;
  Eigen::MatrixXd potential;
};

/// Dense evaluator of a localized first-order Trefftz basis used by the
/// solvers. Evaluating the reference basis at mapped points is equivalent to
/// evaluating the output of `localize`, without re-expanding polynomials.
class TrefftzEvaluator {
 public:
  TrefftzEvaluator(const FirstOrderTrefftzBasis& basis, bool include_constant);

  int n() const { return n_; }
  int p() const { return p_; }
  int size() const { return static_cast<int>(cv_.rows()); }
  bool has_constant() const { return include_constant_; }

  /// `x` holds npts * n coordinates, `t` holds npts times.
  void eval(const Localization& where, std::span<const double> x, std::span<const double> t,
            BasisValues& out, bool with_potential) const;

  /// Monomial-coefficient matrices, rows = members.
  const Eigen::MatrixXd& v_coeffs() const { return cv_; }

 private:
  int n_;
  int p_;
  bool include_constant_;
  std::vector<MultiIndex> monomials_;
  int max_degree_;
  Eigen::MatrixXd cv_;
  std::array<Eigen::MatrixXd, kMaxSpaceDim> cs_;
  Eigen::MatrixXd cu_;
  // Nonzeros of [cv; cs_0; ...; cu] by row; the bases are very sparse in
  // the monomials.
  std::vector<int> row_start_;
  std::vector<int> nz_col_;
  std::vector<double> nz_val_;
};

}  // namespace ttdg

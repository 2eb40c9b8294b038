#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"
#include "ttdg/poly.hpp"

using namespace ttdg;
using ttdg::testing::coeff_distance;
using ttdg::testing::poly1;
using ttdg::testing::poly2;

TEST(Poly, EvalSimpleSum) {
  const auto p = poly1({{1.0, 2, 0}, {1.0, 0, 2}});
  const double x[] = {1.0};
  EXPECT_DOUBLE_EQ(p.eval(x, 1.0), 2.0);
}

TEST(Poly, EvalZero) {
  const SpaceTimePolynomial z(2);
  const double x[] = {0.3, -7.0};
  EXPECT_EQ(z.eval(x, 11.0), 0.0);
}

TEST(Poly, EvalCubic) {
  // 8 + 3 * 2 * 0.25
  const auto p = poly1({{1.0, 3, 0}, {3.0, 1, 2}});
  const double x[] = {2.0};
  EXPECT_DOUBLE_EQ(p.eval(x, 0.5), 9.5);
}

TEST(Poly, EvalDimensionMismatch) {
  const auto p = poly1({{1.0, 1, 0}});
  const double x[] = {1.0, 2.0};
  try {
    p.eval(x, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(Poly, DeriveExamples) {
  EXPECT_EQ(coeff_distance(derive(poly1({{1.0, 2, 0}, {1.0, 0, 2}}), Axis::time()), poly1({{2.0, 0, 1}})), 0.0);
  EXPECT_EQ(coeff_distance(derive(poly1({{1.0, 1, 1}}), Axis::space(0)), poly1({{1.0, 0, 1}})), 0.0);
  const auto d = derive(poly1({{1.0, 3, 0}, {3.0, 1, 2}}), Axis::space(0));
  EXPECT_EQ(coeff_distance(d, poly1({{3.0, 2, 0}, {3.0, 0, 2}})), 0.0);
}

TEST(Poly, DeriveAxisOutOfRange) {
  EXPECT_THROW(derive(poly1({{1.0, 1, 0}}), Axis::space(1)), Error);
}

TEST(Poly, DeriveLowersDegreeBound) {
  const auto p = poly1({{1.0, 3, 0}});
  EXPECT_EQ(derive(p, Axis::space(0)).degree_bound(), p.degree_bound() - 1);
  EXPECT_EQ(derive(SpaceTimePolynomial::constant(1, 4.0), Axis::time()).degree_bound(), 0);
}

TEST(Poly, WaveResidualExamples) {
  EXPECT_TRUE(wave_residual(poly1({{1.0, 2, 0}, {1.0, 0, 2}}), 1.0).is_zero());
  const auto r = wave_residual(poly1({{1.0, 2, 0}}), 1.0);
  EXPECT_EQ(coeff_distance(r, SpaceTimePolynomial::constant(1, -2.0)), 0.0);
  EXPECT_TRUE(wave_residual(poly1({{1.0, 2, 0}, {4.0, 0, 2}}), 2.0).is_zero());
}

TEST(Poly, AffineMapExamples) {
  const double origin[] = {0.0};
  EXPECT_LT(coeff_distance(affine_map(poly1({{1.0, 1, 0}}), origin, 0.0, 2.0, 1.0), poly1({{0.5, 1, 0}})), 1e-15);
  // 2 (t - 1)
  EXPECT_LT(coeff_distance(affine_map(poly1({{1.0, 0, 1}}), origin, 1.0, 1.0, 2.0), poly1({{2.0, 0, 1}, {-2.0, 0, 0}})),
            1e-15);
  // 4 (x - 1)^2 + 4 t^2 = 4x^2 - 8x + 4 + 4t^2
  const double one[] = {1.0};
  const auto q = affine_map(poly1({{1.0, 2, 0}, {1.0, 0, 2}}), one, 0.0, 0.5, 1.0);
  EXPECT_LT(coeff_distance(q, poly1({{4.0, 2, 0}, {-8.0, 1, 0}, {4.0, 0, 0}, {4.0, 0, 2}})), 1e-14);
}

TEST(Poly, NoStoredZeros) {
  auto p = poly1({{1.0, 1, 0}});
  p.add_term(MultiIndex::zero(1).with_space(0, 1), -1.0);
  EXPECT_TRUE(p.is_zero());
  const auto q = poly1({{1.0, 1, 0}}) - poly1({{1.0, 1, 0}});
  EXPECT_EQ(q.size(), 0u);
}

TEST(Poly, MultiIndexEquality) {
  const int a[] = {1, 2};
  const int b[] = {1, 2};
  const int c[] = {2, 1};
  EXPECT_EQ(MultiIndex(a, 3), MultiIndex(b, 3));
  EXPECT_NE(MultiIndex(a, 3), MultiIndex(c, 3));
  EXPECT_NE(MultiIndex(a, 3), MultiIndex(a, 2));
  EXPECT_EQ(MultiIndex(a, 3).total_degree(), 6);
}

TEST(Poly, IndexCounts) {
  EXPECT_EQ(count_monomials(2, 3), 10u);
  EXPECT_EQ(space_indices(2, 3).size(), 10u);
  EXPECT_EQ(spacetime_indices(2, 3).size(), 20u);
  EXPECT_EQ(count_monomials(3, -1), 0u);
}

namespace {

SpaceTimePolynomial random_poly(std::mt19937& rng, int dim, int degree, int terms) {
  std::uniform_int_distribution<int> pick(0, static_cast<int>(spacetime_indices(dim, degree).size()) - 1);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const auto all = spacetime_indices(dim, degree);
  SpaceTimePolynomial p(dim);
  for (int i = 0; i < terms; ++i) p.add_term(all[pick(rng)], coef(rng));
  return p;
}

}  // namespace

TEST(PolyProperty, DerivativesCommute) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int dim = 1 + trial % 3;
    const auto p = random_poly(rng, dim, 7, 12);
    for (int m = 0; m < dim; ++m) {
      const auto a = derive(derive(p, Axis::space(m)), Axis::time());
      const auto b = derive(derive(p, Axis::time()), Axis::space(m));
      EXPECT_EQ(coeff_distance(a, b), 0.0);
    }
  }
}

TEST(PolyProperty, AffineMapMatchesSubstitution) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 1 + trial % 3;
    const auto p = random_poly(rng, dim, 8, 15);
    const double x0[] = {u(rng), u(rng), u(rng)};
    const double t0 = u(rng);
    const double h = 0.2 + std::abs(u(rng));
    const double c = 0.5 + 2.0 * std::abs(u(rng));
    const auto q = affine_map(p, std::span<const double>(x0, dim), t0, h, c);
    for (int s = 0; s < 5; ++s) {
      double x[3];
      double xh[3];
      for (int d = 0; d < dim; ++d) {
        x[d] = x0[d] + h * u(rng);
        xh[d] = (x[d] - x0[d]) / h;
      }
      const double t = t0 + h / c * u(rng);
      const double ref = p.eval(std::span<const double>(xh, dim), c * (t - t0) / h);
      const double got = q.eval(std::span<const double>(x, dim), t);
      // relative to the sum of absolute term values, the conditioning of
      // evaluating the expanded form
      double scale = 0.0;
      for (const auto& [idx, a] : q.coeffs()) {
        double m = std::abs(a) * std::pow(std::abs(t), idx.time());
        for (int d = 0; d < dim; ++d) m *= std::pow(std::abs(x[d]), idx.space(d));
        scale += m;
      }
      EXPECT_NEAR(got, ref, 1e-13 * std::max(scale, std::abs(ref))) << "trial " << trial;
    }
  }
}

TEST(PolyProperty, WaveResidualIsLinear) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 1 + trial % 3;
    const auto p = random_poly(rng, dim, 6, 10);
    const auto q = random_poly(rng, dim, 6, 10);
    const double a = 1.7;
    const auto lhs = wave_residual(a * p + q, 1.3);
    const auto rhs = a * wave_residual(p, 1.3) + wave_residual(q, 1.3);
    EXPECT_LT(coeff_distance(lhs, rhs), 1e-12 * std::max(1.0, lhs.max_abs_coeff()));
  }
}

TEST(Poly, MultiplicationAndToString) {
  const auto p = poly2({{1.0, 1, 0, 0}, {1.0, 0, 0, 1}});
  const auto sq = p * p;
  const double x[] = {0.3, 0.9};
  EXPECT_NEAR(sq.eval(x, 0.4), 0.49, 1e-15);
  EXPECT_FALSE(sq.to_string().empty());
}

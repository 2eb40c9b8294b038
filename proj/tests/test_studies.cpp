#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "ttdg/studies.hpp"

using namespace ttdg;

TEST(Rays, SourceAboveReceiverNextToFastMedium) {
  const auto a = ray_arrivals({1.0, 1.0}, {1.0, 0.25}, 1.2, 1.0, 3.0);
  EXPECT_NEAR(a.direct, 0.75, 1e-14);
  // mirror source at (1.4, 1): sqrt(0.4^2 + 0.75^2) = 0.85
  EXPECT_NEAR(a.reflected, 0.85, 1e-14);
  // legs 0.2 / cos(theta_c) each, then 0.75 - 0.4 tan(theta_c) at speed 3
  const double tc = std::asin(1.0 / 3.0);
  EXPECT_NEAR(a.head, 0.4 / std::cos(tc) + (0.75 - 0.4 * std::tan(tc)) / 3.0, 1e-14);
  EXPECT_NEAR(a.head, 0.6271, 1e-4);
  EXPECT_LT(a.head, a.direct);
  EXPECT_LT(a.direct, a.reflected);
}

TEST(Rays, RejectsSlowerSecondMedium) {
  EXPECT_THROW(ray_arrivals({1.0, 1.0}, {1.0, 0.25}, 1.2, 3.0, 1.0), Error);
  // receiver too close for a head wave
  EXPECT_THROW(ray_arrivals({1.0, 1.0}, {1.0, 0.95}, 1.2, 1.0, 3.0), Error);
}

TEST(Peaks, ThreeBumps) {
  std::vector<std::pair<double, double>> s;
  for (int i = 0; i <= 1000; ++i) {
    const double t = i * 1e-3;
    const double u = 0.05 * std::exp(-std::pow((t - 0.3) / 0.02, 2)) + std::exp(-std::pow((t - 0.5) / 0.02, 2)) +
                     0.5 * std::exp(-std::pow((t - 0.7) / 0.02, 2));
    s.emplace_back(t, u);
  }
  const auto p = find_peaks(s, 0.01, 0.05);
  ASSERT_EQ(p.size(), 3u);
  EXPECT_NEAR(p[0], 0.3, 1e-3);
  EXPECT_NEAR(p[1], 0.5, 1e-3);
  EXPECT_NEAR(p[2], 0.7, 1e-3);
  // threshold above the weak bump drops it
  EXPECT_EQ(find_peaks(s, 0.1, 0.05).size(), 2u);
}

TEST(Peaks, MergesWithinGap) {
  const std::vector<std::pair<double, double>> s{{0.0, 0.0}, {0.1, 1.0}, {0.2, 0.5}, {0.3, 0.9}, {0.4, 0.0}};
  EXPECT_EQ(find_peaks(s, 0.0, 0.5).size(), 1u);
  EXPECT_EQ(find_peaks(s, 0.0, 0.1).size(), 2u);
}

TEST(DofRates, CubeRootScaling) {
  std::vector<LShapeRow> rows(3);
  rows[0] = {"uniform", 0.1, 0, 1000, 1.0, 0.0, 0.0};
  rows[1] = {"uniform", 0.05, 0, 8000, 0.25, 0.0, 0.0};
  rows[2] = {"graded", 0.1, 0, 1000, 1.0, 0.0, 0.0};
  fill_dof_rates(rows);
  EXPECT_DOUBLE_EQ(rows[0].rate, 0.0);
  EXPECT_NEAR(rows[1].rate, 2.0, 1e-12);  // dofs^(1/3) doubles, error quarters
  EXPECT_DOUBLE_EQ(rows[2].rate, 0.0);    // a new series starts
}

TEST(DofRates, TabulatedPairs) {
  std::vector<LShapeRow> rows(2);
  rows[0] = {"uniform", 0.07, 0, 320112, 0.0178, 0.0, 0.0};
  rows[1] = {"uniform", 0.05, 0, 875696, 0.0117, 0.0, 0.0};
  fill_dof_rates(rows);
  // the tabulated errors carry three figures, which moves the rate by ~0.015
  EXPECT_NEAR(rows[1].rate, 1.2638, 0.02);
  rows[0] = {"graded", 0.12, 0, 1138256, 0.0218, 0.0, 0.0};
  rows[1] = {"graded", 0.10, 0, 2003536, 0.0083, 0.0, 0.0};
  fill_dof_rates(rows);
  EXPECT_NEAR(rows[1].rate, 5.1308, 0.05);
}

TEST(BasisReport, Dimensions) {
  const auto a = basis_report(3, 1, SeedKind::Monomial);
  EXPECT_EQ(a.first_order_dim, 8u);
  EXPECT_EQ(a.scalar_dim, 7u);
  EXPECT_EQ(a.first_order_rank, 8u);
  const auto b = basis_report(3, 2, SeedKind::Legendre);
  EXPECT_EQ(b.scalar_dim, 16u);
  EXPECT_EQ(b.first_order_dim, 24u);  // C(6,2) + C(5,2) - 1
  EXPECT_EQ(b.first_order_rank, 24u);
  EXPECT_LE(b.first_order_residual, 1e-12);
  EXPECT_LE(b.scalar_residual, 1e-12);
}

TEST(Meshes, UnitAndHetero) {
  EXPECT_EQ(unit_mesh(1, 0.25).num_elements(), 4);
  EXPECT_EQ(unit_mesh(2, 0.5).num_elements(), 8);
  EXPECT_THROW(unit_mesh(3, 0.5), Error);
  HeteroSetup s;
  s.h = 0.2;
  const auto m = hetero_mesh(s);
  int fast = 0;
  for (int k = 0; k < m.num_elements(); ++k) fast += m.material(k);
  EXPECT_EQ(fast, 2 * 4 * 10);  // 4 of 10 columns lie beyond x = 1.2
  s.h = 0.3;
  EXPECT_THROW(hetero_mesh(s), Error);
}

TEST(Csv, Headers) {
  std::ostringstream a, b, c, d;
  write_csv(a, std::vector<ConvergenceRow>{});
  write_csv(b, std::vector<EnergyRow>{});
  write_csv(c, std::vector<std::pair<double, double>>{});
  write_snapshot_csv(d, {});
  EXPECT_EQ(a.str(), "h,p,dofs,error,rate,seconds\n");
  EXPECT_EQ(b.str(), "t,p,E,relerr\n");
  EXPECT_EQ(c.str(), "t,UC\n");
  EXPECT_EQ(d.str(), "x,y,t,U\n");
}

TEST(Studies, ConvergenceRatesAgainstPreviousRow) {
  StudyOptions opt;
  const auto rows = h_convergence(1, {2}, {0.25, 0.125}, opt);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].rate, 0.0);
  EXPECT_NEAR(rows[1].rate, std::log2(rows[0].error / rows[1].error), 1e-12);
  EXPECT_GT(rows[1].rate, 2.5);
}

TEST(Studies, EnergyStartsExact) {
  StudyOptions opt;
  const auto rows = energy_study({3}, 1.0, 0.5, opt);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[0].E, M_PI * M_PI / 4.0, 1e-10);
  EXPECT_LE(rows[2].E, rows[1].E * (1 + 1e-12));
}

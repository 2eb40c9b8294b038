#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ttdg/dg.hpp"

using namespace ttdg;

namespace {

// U = x^2 + |y|^2 + n t^2 with c = 1: v = 2 n t, sigma = -2 x.
class QuadraticWave final : public Field {
 public:
  explicit QuadraticWave(int n) : n_(n) {}
  FieldValue eval(std::span<const double> x, double t) const override {
    FieldValue f;
    f.v = 2.0 * n_ * t;
    f.U = n_ * t * t;
    for (int d = 0; d < n_; ++d) {
      f.sigma[d] = -2.0 * x[d];
      f.U += x[d] * x[d];
    }
    return f;
  }

 private:
  int n_;
};

class ConstantState final : public Field {
 public:
  FieldValue eval(std::span<const double>, double) const override {
    FieldValue f;
    f.v = 1.0;
    return f;
  }
};

class SineBump final : public Field {
 public:
  FieldValue eval(std::span<const double> x, double) const override {
    FieldValue f;
    f.v = std::sin(M_PI * x[0]);
    f.sigma[0] = 0.3 * std::cos(2.0 * M_PI * x[0]);
    if (x.size() > 1) f.v *= std::sin(M_PI * x[1]);
    return f;
  }
};

struct TentRun {
  SpatialMesh mesh;
  WavespeedMap speeds;
  TentSlab slab;
  FirstOrderTrefftzBasis basis;
  TrefftzEvaluator evaluator;
  TraceStore traces;
  TentContext ctx;

  TentRun(SpatialMesh m, WavespeedMap s, int p, double T, const Field& initial, const Field& boundary,
      DGParams params = {})
      : mesh(std::move(m)),
        speeds(std::move(s)),
        slab(pitch(mesh, speeds, T, 0.5)),
        basis(build_first_order_basis(p, mesh.dim())),
        evaluator(basis, params.recovery),
        traces(mesh, simplex_rule(mesh.dim(), 2 * p + 2), params.recovery) {
    traces.initialize(initial, 0.0);
    ctx = make_context(mesh, slab, speeds, basis, evaluator, params, boundary, traces);
  }

  void solve_all() {
    for (const auto& t : slab.tents) solve_tent(ctx, t);
  }
};

double max_trace_error(const TraceStore& traces, const Field& exact) {
  const int n = traces.dim();
  const int nv = traces.values_per_point();
  double err = 0.0;
  for (int k = 0; k < traces.num_elements(); ++k) {
    const auto x = traces.points(k);
    const auto vals = traces.values(k);
    for (int q = 0; q < traces.points_per_element(); ++q) {
      const auto f = exact.eval(x.subspan(q * n, n), traces.time_at(k, q));
      err = std::max(err, std::abs(vals[q * nv] - f.v));
      for (int d = 0; d < n; ++d) err = std::max(err, std::abs(vals[q * nv + 1 + d] - f.sigma[d]));
      if (traces.with_potential()) err = std::max(err, std::abs(vals[q * nv + n + 1] - f.U));
    }
  }
  return err;
}

double trace_energy(const TraceStore& traces, const std::vector<double>& c) {
  const int n = traces.dim();
  const int nv = traces.values_per_point();
  double e = 0.0;
  for (int k = 0; k < traces.num_elements(); ++k) {
    const auto vals = traces.values(k);
    const auto w = traces.weights(k);
    for (int q = 0; q < traces.points_per_element(); ++q) {
      double s = vals[q * nv] * vals[q * nv] / (c[k] * c[k]);
      for (int d = 0; d < n; ++d) s += vals[q * nv + 1 + d] * vals[q * nv + 1 + d];
      e += 0.5 * w[q] * s;
    }
  }
  return e;
}

}  // namespace

TEST(AssembleTent, ExactTrefftzSolutionHasTinyResidual) {
  const QuadraticWave exact(2);
  TentRun run(make_square_mesh(0.5), WavespeedMap::uniform(1.0), 2, 0.3, exact, exact);
  const Tent& tent = run.slab.tents[0];
  const auto sys = assemble_tent(run.ctx, tent);
  ASSERT_EQ(sys.materials.size(), 1u);

  // least-squares coefficients of the exact solution on top-face points
  const auto& where = sys.where[0];
  std::vector<double> x, t;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (int i = 0; i < 60; ++i) {
    x.push_back(where.center_x[0] + u(rng));
    x.push_back(where.center_x[1] + u(rng));
    t.push_back(where.center_t + 0.5 * u(rng));
  }
  BasisValues b;
  run.evaluator.eval(where, x, t, b, false);
  const int m = run.evaluator.size();
  Eigen::MatrixXd M(3 * 60, m);
  Eigen::VectorXd r(3 * 60);
  for (int i = 0; i < 60; ++i) {
    const auto f = exact.eval(std::span<const double>(x).subspan(2 * i, 2), t[i]);
    M.row(i) = b.v.col(i).transpose();
    M.row(60 + i) = b.sigma[0].col(i).transpose();
    M.row(120 + i) = b.sigma[1].col(i).transpose();
    r[i] = f.v;
    r[60 + i] = f.sigma[0];
    r[120 + i] = f.sigma[1];
  }
  const Eigen::VectorXd coeffs = M.colPivHouseholderQr().solve(r);
  ASSERT_LE((M * coeffs - r).norm(), 1e-10 * r.norm());
  EXPECT_LE((sys.A * coeffs - sys.b).norm(), 1e-10 * sys.b.norm());
}

TEST(AssembleTent, ExactSolutionReproducedOnFinalFront) {
  for (int n : {1, 2}) {
    const QuadraticWave exact(n);
    auto mesh = n == 1 ? make_interval_mesh(0.0, 1.0, 6) : make_square_mesh(0.25);
    TentRun run(std::move(mesh), WavespeedMap::uniform(1.0), 2, 0.4, exact, exact);
    run.solve_all();
    EXPECT_TRUE(run.traces.is_flat(0.4, 1e-14));
    EXPECT_LE(max_trace_error(run.traces, exact), 1e-9) << "n = " << n;
  }
}

TEST(AssembleTent, NeumannDataReproduced) {
  const QuadraticWave exact(2);
  TentRun run(make_square_mesh(0.25, BoundaryMarker::Neumann), WavespeedMap::uniform(1.0), 1, 0.3, exact, exact);
  run.solve_all();
  EXPECT_LE(max_trace_error(run.traces, exact), 1e-9);
}

TEST(AssembleTent, RecoveryReproducesPotential) {
  const QuadraticWave exact(2);
  DGParams params;
  params.recovery = true;
  TentRun run(make_square_mesh(0.25), WavespeedMap::uniform(1.0), 2, 0.3, exact, exact, params);
  run.solve_all();
  EXPECT_EQ(run.traces.values_per_point(), 4);
  EXPECT_LE(max_trace_error(run.traces, exact), 1e-9);
}

TEST(AssembleTent, ConstantStatePropagatesUnchanged) {
  const ConstantState state;
  TentRun run(make_square_mesh(0.25, BoundaryMarker::Neumann), WavespeedMap::uniform(1.0), 3, 0.5, state, state);
  run.solve_all();
  EXPECT_LE(max_trace_error(run.traces, state), 1e-11);
  for (int k = 0; k < run.mesh.num_elements(); ++k) {
    for (double f : run.traces.front(k)) EXPECT_EQ(f, 0.5);
  }
}

TEST(AssembleTent, EqualSpeedInterfaceMatchesSingleMaterial) {
  // a solution continuous across the interface and inside both trial spaces
  const QuadraticWave initial(1);
  const QuadraticWave& zero = initial;
  auto base = make_interval_mesh(0.0, 1.0, 5);
  std::vector<int> mat(base.num_elements(), 0);
  for (int k = 3; k < base.num_elements(); ++k) mat[k] = 1;
  SpatialMesh split(1, base.coords(), base.elements(), mat, base.boundary());

  TentRun single(base, WavespeedMap::uniform(1.0), 3, 0.6, initial, zero);
  TentRun two(split, WavespeedMap({{0, 1.0}, {1, 1.0}}), 3, 0.6, initial, zero);
  ASSERT_EQ(dump_slab(single.slab), dump_slab(two.slab));
  bool saw_two_regions = false;
  for (const auto& t : two.slab.tents) {
    for (int k : t.star) saw_two_regions = saw_two_regions || split.material(k) != split.material(t.star.front());
  }
  EXPECT_TRUE(saw_two_regions);
  const auto sys = assemble_tent(two.ctx, two.slab.tents[0]);
  EXPECT_EQ(sys.A.rows(), static_cast<int>(sys.materials.size()) * two.evaluator.size());

  single.solve_all();
  two.solve_all();
  double diff = 0.0;
  for (int k = 0; k < base.num_elements(); ++k) {
    const auto a = single.traces.values(k);
    const auto b = two.traces.values(k);
    for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
  }
  EXPECT_LE(diff, 1e-10);
}

TEST(AssembleTent, HomogeneousDirichletDissipatesEnergy) {
  const SineBump initial;
  const ZeroField zero;
  for (int n : {1, 2}) {
    auto mesh = n == 1 ? make_interval_mesh(0.0, 1.0, 8) : make_square_mesh(0.25);
    TentRun run(std::move(mesh), WavespeedMap::uniform(1.0), 2, 0.5, initial, zero);
    const auto c = run.speeds.element_speeds(run.mesh);
    const double e0 = trace_energy(run.traces, c);
    run.solve_all();
    const double e1 = trace_energy(run.traces, c);
    EXPECT_GT(e1, 0.0);
    EXPECT_LE(e1, e0 + 1e-12 * e0) << "n = " << n;
  }
}

TEST(AssembleTent, StaleTraceIsASchedulingError) {
  const ConstantState state;
  TentRun run(make_interval_mesh(0.0, 1.0, 2), WavespeedMap::uniform(1.0), 1, 1.0, state, state);
  // tent 2 depends on tents 0 and 1, which have not run
  try {
    assemble_tent(run.ctx, run.slab.tents[2]);
    FAIL() << "expected a scheduling error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Scheduling);
  }
}

TEST(SolveLocal, SmallSystems) {
  LocalSystem s;
  s.A = Eigen::MatrixXd::Identity(3, 3);
  s.b = Eigen::VectorXd::Unit(3, 0);
  EXPECT_EQ(solve_local(s).x, s.b);
  s.A = Eigen::Vector2d(2.0, 4.0).asDiagonal();
  s.b = Eigen::Vector2d(2.0, 4.0);
  const auto sol = solve_local(s);
  EXPECT_DOUBLE_EQ(sol.x[0], 1.0);
  EXPECT_DOUBLE_EQ(sol.x[1], 1.0);
  EXPECT_GT(sol.rcond, 0.0);
}

TEST(SolveLocal, RandomWellConditioned) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LocalSystem s;
  s.A = Eigen::MatrixXd::NullaryExpr(20, 20, [&] { return u(rng); });
  s.A += 20.0 * Eigen::MatrixXd::Identity(20, 20);
  const Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(20, [&] { return u(rng); });
  s.b = s.A * x;
  const auto sol = solve_local(s);
  EXPECT_LE((s.A * sol.x - s.b).norm(), 1e-11 * s.b.norm());
  EXPECT_LE((sol.x - x).norm(), 1e-12 * x.norm() * 10);
}

TEST(SolveLocal, SingularReportsTent) {
  LocalSystem s;
  s.tent = 7;
  s.A = Eigen::MatrixXd::Zero(2, 2);
  s.b = Eigen::VectorXd::Ones(2);
  try {
    solve_local(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularMatrix);
    EXPECT_NE(std::string(e.what()).find("tent 7"), std::string::npos);
  }
}

TEST(TraceStore, FootprintMatchesPointCount) {
  const auto mesh = make_square_mesh(0.25);
  TraceStore plain(mesh, simplex_rule(2, 6), false);
  TraceStore with_u(mesh, simplex_rule(2, 6), true);
  const std::size_t pts = static_cast<std::size_t>(mesh.num_elements()) * plain.points_per_element();
  EXPECT_EQ(plain.storage_size(), pts * 3);
  EXPECT_EQ(with_u.storage_size(), pts * 4);
  double area = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    for (double w : plain.weights(k)) area += w;
  }
  EXPECT_NEAR(area, 1.0, 1e-13);
}

TEST(DGParams, RejectsNegativePenalties) {
  DGParams p;
  p.alpha = -1.0;
  EXPECT_THROW(p.check(), Error);
  p.alpha = 0.0;
  p.beta = -0.1;
  EXPECT_THROW(p.check(), Error);
}

#pragma once

#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ttdg/dg.hpp"
#include "ttdg/exact.hpp"
#include "ttdg/trefftz.hpp"

namespace ttdg {

/// Trial/test space of the Cartesian solver.
enum class SpaceKind { Trefftz, FullPoly };

const char* to_string(SpaceKind kind);
SpaceKind parse_space_kind(const std::string& name);

/// Space-time rectangles [x_i, x_i+1] x [t0 + j dt, t0 + (j+1) dt] over the
/// unit interval.
struct CartesianSlab {
  int nx = 4;
  int nt = 1;
  double t0 = 0.0;
  double dt = 0.25;
  double c = 1.0;
  int p = 2;
  SpaceKind kind = SpaceKind::Trefftz;
  SeedKind seed = SeedKind::Monomial;

  double hx() const { return 1.0 / nx; }
  int num_elements() const { return nx * nt; }
  int index(int i, int j) const { return j * nx + i; }
};

/// Local trial space on one rectangle. Values (and, for the full polynomial
/// space, derivatives) are returned with members as rows, points as columns.
class SlabSpace {
 public:
  SlabSpace(SpaceKind kind, int p, SeedKind seed, double c);
  int size() const { return size_; }
  SpaceKind kind() const { return kind_; }

  struct Values {
    Eigen::MatrixXd v, s;            // values of the v and sigma components
    Eigen::MatrixXd v_x, v_t, s_x, s_t;  // derivatives, full space only
  };
  void eval(double xc, double tc, double hx, double ht, std::span<const double> x, std::span<const double> t,
            Values& out, bool derivatives) const;

 private:
  SpaceKind kind_;
  int p_;
  double c_;
  int size_;
  std::unique_ptr<FirstOrderTrefftzBasis> basis_;
  std::unique_ptr<TrefftzEvaluator> trefftz_;
};

/// Volume term -int_K v (d_x tau + c^-2 d_t w) + sigma (d_t tau + d_x w) of
/// the full polynomial space on one rectangle; rows are test members.
Eigen::MatrixXd volume_matrix(const SlabSpace& space, double xc, double tc, double hx, double ht, double c, int p);

/// Block-sparse global system: one block row per element.
struct BlockSystem {
  int block = 0;
  std::vector<Eigen::MatrixXd> diag;
  std::vector<std::vector<std::pair<int, Eigen::MatrixXd>>> off;
  Eigen::VectorXd rhs;

  int num_blocks() const { return static_cast<int>(diag.size()); }
  int size() const { return num_blocks() * block; }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd dense() const;
};

struct SlabBoundary {
  BoundaryMarker left = BoundaryMarker::Dirichlet;
  BoundaryMarker right = BoundaryMarker::Dirichlet;
};

/// Assembles the DG system of the slab; `bottom` supplies (v, sigma) on
/// t = t0, `boundary` the Dirichlet value v or Neumann value sigma . n.
BlockSystem assemble_slab(const CartesianSlab& slab, const SlabSpace& space, const Field& bottom,
                          const Field& boundary, const DGParams& params, SlabBoundary markers = {});

struct IterativeResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

IterativeResult block_jacobi(const BlockSystem& sys, double tol = 1e-10, int maxit = 10000);
Eigen::VectorXd direct_solve(const BlockSystem& sys);

/// Evaluates a slab solution (coefficients per element) at points.
class SlabSolution final : public Field {
 public:
  SlabSolution(CartesianSlab slab, const SlabSpace& space, Eigen::VectorXd coeffs);
  FieldValue eval(std::span<const double> x, double t) const override;
  const CartesianSlab& slab() const { return slab_; }

 private:
  CartesianSlab slab_;
  const SlabSpace* space_;
  Eigen::VectorXd coeffs_;
};

enum class SlabSolver { BlockJacobi, Direct };

struct CartesianRun {
  int nx = 8;
  int p = 2;
  double T = 1.0;
  SpaceKind kind = SpaceKind::Trefftz;
  SeedKind seed = SeedKind::Monomial;
  double c = 1.0;
  DGParams params;
  SlabSolver solver = SlabSolver::BlockJacobi;
  double tol = 1e-10;
  int maxit = 10000;
  /// Time layers per slab; the slab height is layers * h.
  int layers = 1;
};

struct CartesianResult {
  double error = 0.0;
  long long dofs = 0;  // unknowns summed over all slabs
  int dofs_per_element = 0;
  int slabs = 0;
  long long iterations = 0;
  bool converged = true;
  double seconds = 0.0;
};

/// Solves the problem with exact solution `exact` (initial and boundary data
/// taken from it) on stacked slabs of height h and returns the error at T.
CartesianResult run_cartesian(const CartesianRun& run, const Field& exact);

}  // namespace ttdg

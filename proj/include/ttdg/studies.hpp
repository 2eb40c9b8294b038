#pragma once

#include <array>
#include <ostream>
#include <string>
#include <vector>

#include "ttdg/runner.hpp"
#include "ttdg/slab.hpp"

namespace ttdg {

struct StudyOptions {
  double T = 1.0;
  double gamma = 0.5;
  DGParams params;
  SeedKind seed = SeedKind::Monomial;
  int workers = 1;
};

struct BasisReport {
  int p = 0;
  int n = 1;
  SeedKind seed = SeedKind::Monomial;
  std::size_t scalar_dim = 0;
  std::size_t first_order_dim = 0;
  std::size_t scalar_rank = 0;
  std::size_t first_order_rank = 0;
  /// Largest residual coefficient relative to the member's largest coefficient.
  double scalar_residual = 0.0;
  double first_order_residual = 0.0;
  double seconds = 0.0;
};
/// Builds both Trefftz bases and measures residuals and coefficient ranks.
BasisReport basis_report(int p, int n, SeedKind seed);

/// Unit interval (n = 1) or unit square (n = 2, legs of length h) mesh.
SpatialMesh unit_mesh(int n, double h, BoundaryMarker marker = BoundaryMarker::Dirichlet);

struct ConvergenceRow {
  double h = 0.0;
  int p = 0;
  long long dofs = 0;
  double error = 0.0;
  double rate = 0.0;  // against the previous row with the same p; 0 for the first
  double seconds = 0.0;
};

/// Standing-wave errors on unit meshes for every (p, h).
std::vector<ConvergenceRow> h_convergence(int n, const std::vector<int>& ps, const std::vector<double>& hs,
                                          const StudyOptions& opt);
/// Rates in p-convergence rows are log2 of successive error ratios.
std::vector<ConvergenceRow> p_convergence(int n, double h, const std::vector<int>& ps, const StudyOptions& opt);
void write_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);

struct SpaceRow {
  int p = 0;
  SpaceKind kind = SpaceKind::Trefftz;
  int dofs_per_element = 0;
  long long dofs = 0;
  double error = 0.0;
  double seconds = 0.0;
};
/// Trefftz versus full polynomial space on the 1+1 Cartesian slab.
std::vector<SpaceRow> compare_spaces(double h, const std::vector<int>& ps, const StudyOptions& opt);
void write_csv(std::ostream& out, const std::vector<SpaceRow>& rows);

struct MeshingRow {
  std::string method;
  double h = 0.0;
  int p = 0;
  long long dofs = 0;
  double error = 0.0;
  long long iterations = 0;
  double seconds = 0.0;
};
/// Tents (sequential and with opt.workers) versus block-Jacobi slabs, n = 1.
std::vector<MeshingRow> compare_meshing(const std::vector<double>& hs, const std::vector<int>& ps,
                                        const StudyOptions& opt);
void write_csv(std::ostream& out, const std::vector<MeshingRow>& rows);

struct SeedRow {
  SeedKind seed = SeedKind::Monomial;
  int p = 0;
  double error = 0.0;
  double condition = 0.0;  // largest reciprocal of the tent condition estimates
  double seconds = 0.0;
};
std::vector<SeedRow> seed_study(int n, double h, const std::vector<int>& ps, const StudyOptions& opt);
void write_csv(std::ostream& out, const std::vector<SeedRow>& rows);

struct EnergyRow {
  double t = 0.0;
  int p = 0;
  double E = 0.0;
  double relerr = 0.0;
};
/// Homogeneous-Dirichlet sine wave on 5 elements, energy after every slab of
/// height `every`.
std::vector<EnergyRow> energy_study(const std::vector<int>& ps, double T, double every, const StudyOptions& opt);
void write_csv(std::ostream& out, const std::vector<EnergyRow>& rows);

struct LShapeRow {
  std::string mesh;
  double h_max = 0.0;
  int elements = 0;
  long long dofs = 0;
  double error = 0.0;
  double rate = 0.0;  // in (global dofs)^(-1/3)
  double seconds = 0.0;
};
/// Bessel solution on the L-shape, recovered potential error at T.
LShapeRow lshape_run(double h_max, double mu, int p, const StudyOptions& opt);
void fill_dof_rates(std::vector<LShapeRow>& rows);
void write_csv(std::ostream& out, const std::vector<LShapeRow>& rows);

struct HeteroSetup {
  double h = 0.05;
  int p = 4;
  double T = 1.0;
  double delta = 0.01;
  double interface_x = 1.2;
  double c_left = 1.0;
  double c_right = 3.0;
  std::array<double, 2> source{1.0, 1.0};
  std::array<double, 2> receiver{1.0, 0.25};
  double box_half = 0.0078125;  // 2^-7
  double dt_sample = 0.005;
  int box_points = 6;
  std::vector<double> snapshot_times;
  int snapshot_grid = 0;  // samples per axis; 0 disables snapshots
};

struct HeteroResult {
  std::vector<std::pair<double, double>> series;  // (t, U_C)
  std::vector<std::array<double, 4>> snapshots;   // x, y, t, U
  long long tents = 0;
  long long dofs = 0;
  double seconds = 0.0;
};

/// Two-material square [0, 2]^2 with the interface aligned to the mesh.
SpatialMesh hetero_mesh(const HeteroSetup& s);
HeteroResult hetero_run(const HeteroSetup& s, const StudyOptions& opt);

/// Ray-theory arrival times at the receiver: head wave along the interface,
/// direct wave and the wave reflected at the interface (source and receiver
/// in the slow medium).
struct Arrivals {
  double head = 0.0;
  double direct = 0.0;
  double reflected = 0.0;
};
Arrivals ray_arrivals(std::array<double, 2> source, std::array<double, 2> receiver, double interface_x, double c1,
                      double c2);

/// Times of local maxima of a series whose value exceeds `threshold` times
/// the series maximum, merging maxima closer than `min_gap`.
std::vector<double> find_peaks(const std::vector<std::pair<double, double>>& series, double threshold, double min_gap);

void write_csv(std::ostream& out, const std::vector<std::pair<double, double>>& measurement);
void write_snapshot_csv(std::ostream& out, const std::vector<std::array<double, 4>>& samples);

}  // namespace ttdg

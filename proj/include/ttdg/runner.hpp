#pragma once

#include <array>
#include <memory>
#include <utility>
#include <vector>

#include "ttdg/dg.hpp"
#include "ttdg/exact.hpp"

namespace ttdg {

/// Values of a flat front at time t, detached from the mesh.
struct FrontSamples {
  int n = 1;
  int num_elements = 0;
  int points_per_element = 0;
  int values_per_point = 0;
  double t = 0.0;
  std::vector<double> x;       // element-major, points * n
  std::vector<double> w;       // quadrature weights
  std::vector<double> values;  // as in TraceStore
  std::vector<double> speed;   // per element

  std::size_t num_points() const { return w.size(); }
  double v(std::size_t i) const { return values[i * values_per_point]; }
  double sigma(std::size_t i, int d) const { return values[i * values_per_point + 1 + d]; }
  bool has_potential() const { return values_per_point == n + 2; }
  double U(std::size_t i) const { return values[i * values_per_point + n + 1]; }
  std::span<const double> point(std::size_t i) const { return {x.data() + i * n, static_cast<std::size_t>(n)}; }
  double speed_at(std::size_t i) const { return speed[i / points_per_element]; }
};

/// Copies a store whose front is flat at t.
FrontSamples capture_front(const TraceStore& traces, const std::vector<double>& speeds, double t);

/// E = 1/2 int c^-2 v^2 + |sigma|^2.
double energy(const FrontSamples& front);
/// Energy of a field on the sample points of a front.
double energy(const FrontSamples& front, const Field& field);
/// (c^-2 |v - v_h|^2 + |sigma - sigma_h|^2)^(1/2) integrated over the front.
double final_error(const FrontSamples& front, const Field& exact);
/// L2 error of the recovered potential.
double potential_error(const FrontSamples& front, const Field& exact);
/// |E(exact) - E_h| / E(exact); throws when the exact energy vanishes.
double energy_error(const FrontSamples& front, const Field& exact);

/// A point value requested inside the space-time domain.
struct Probe {
  std::array<double, 3> x{};
  double t = 0.0;
  int element = -1;  // filled by the runner
  bool found = false;
  FieldValue value;
};

struct ProblemSpec {
  std::shared_ptr<const SpatialMesh> mesh;
  WavespeedMap speeds = WavespeedMap::uniform(1.0);
  int p = 3;
  double T = 1.0;
  std::shared_ptr<const Field> initial;
  std::shared_ptr<const Field> boundary;
  DGParams params;
  SeedKind seed = SeedKind::Monomial;
  double gamma = 0.5;
  int workers = 1;
  /// Height of the stacked time slabs; 0 means one slab of height T.
  double slab_height = 0.0;
  /// Record the energy after every slab.
  bool record_energy = false;
  std::vector<Probe> probes;
};

struct SolutionRecord {
  FrontSamples final_front;
  std::vector<std::pair<double, double>> energy_series;  // (t, E)
  std::vector<Probe> probes;
  long long dofs = 0;
  long long tents = 0;
  int slabs = 0;
  int layers = 0;
  double seconds = 0.0;
  double min_rcond = 1.0;
  long long ill_conditioned = 0;  // tents with condition estimate above 1e12
};

/// Solves every tent of ctx.slab respecting the dependency DAG on a pool of
/// `workers` threads. Results do not depend on the worker count.
std::vector<TentStats> run_tents(const TentContext& ctx, int workers);

SolutionRecord run_simulation(const ProblemSpec& spec);

/// L1 norm of U over the box [x0, x1] x [y0, y1] from probe values laid out
/// by make_box_probes (g x g Gauss points per time, times in order).
struct BoxMeasurement {
  std::array<double, 4> box{};  // x0, x1, y0, y1
  int g = 4;
  std::vector<double> times;
};
std::vector<Probe> make_box_probes(const BoxMeasurement& m);
std::vector<std::pair<double, double>> measurement_UC(const BoxMeasurement& m, const std::vector<Probe>& probes);

}  // namespace ttdg

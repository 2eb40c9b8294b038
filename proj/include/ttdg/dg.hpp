#pragma once

#include <array>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ttdg/mesh.hpp"
#include "ttdg/quad.hpp"
#include "ttdg/tents.hpp"
#include "ttdg/trefftz.hpp"

namespace ttdg {

/// Values of (v, sigma, U) at one space-time point.
struct FieldValue {
  double v = 0.0;
  std::array<double, 3> sigma{};
  double U = 0.0;
};

/// A space-time field: initial data, boundary data or an exact solution.
class Field {
 public:
  virtual ~Field() = default;
  virtual FieldValue eval(std::span<const double> x, double t) const = 0;
};

class ZeroField final : public Field {
 public:
  FieldValue eval(std::span<const double>, double) const override { return {}; }
};

/// Which face carries the unknown term of the recovery augmentation.
enum class RecoveryFace { Bottom, Top };

struct DGParams {
  double alpha = 0.5;
  double beta = 0.5;
  bool recovery = false;
  RecoveryFace recovery_face = RecoveryFace::Bottom;
  /// Integrate recovery mass terms against dS (true) or n^t dS = dx (false).
  bool recovery_surface_measure = true;

  void check() const;
};

/// Most recent front of every element: vertex times and (v, sigma[, U]) at
/// the element's spatial quadrature points lifted onto the front graph.
class TraceStore {
 public:
  TraceStore(const SpatialMesh& mesh, QuadRule rule, bool with_potential);

  int dim() const { return n_; }
  int num_elements() const { return ne_; }
  int points_per_element() const { return rule_.size(); }
  /// n + 1 values per point, n + 2 with the potential.
  int values_per_point() const { return n_ + 1 + (with_potential_ ? 1 : 0); }
  bool with_potential() const { return with_potential_; }
  std::size_t storage_size() const { return values_.size(); }
  const QuadRule& rule() const { return rule_; }

  /// Sets a flat front at time t0 carrying the field's values.
  void initialize(const Field& field, double t0);

  std::span<const double> front(int k) const { return {front_.data() + k * (n_ + 1), static_cast<std::size_t>(n_ + 1)}; }
  std::span<double> front(int k) { return {front_.data() + k * (n_ + 1), static_cast<std::size_t>(n_ + 1)}; }
  /// Spatial coordinates of the element's points, npts * n values.
  std::span<const double> points(int k) const {
    const std::size_t m = static_cast<std::size_t>(rule_.size()) * n_;
    return {x_.data() + k * m, m};
  }
  /// Values for element k, point-major: [q * values_per_point() + c] with
  /// c = 0 for v, 1..n for sigma, n + 1 for U.
  std::span<const double> values(int k) const {
    const std::size_t m = static_cast<std::size_t>(rule_.size()) * values_per_point();
    return {values_.data() + k * m, m};
  }
  std::span<double> values(int k) {
    const std::size_t m = static_cast<std::size_t>(rule_.size()) * values_per_point();
    return {values_.data() + k * m, m};
  }
  /// Quadrature weights (rule weight times Jacobian) for element k.
  std::span<const double> weights(int k) const {
    const std::size_t m = static_cast<std::size_t>(rule_.size());
    return {w_.data() + k * m, m};
  }
  /// Barycentric coordinates of the reference points, npts * (n + 1).
  std::span<const double> barycentric() const { return bary_; }
  /// Time of the front graph at point q of element k.
  double time_at(int k, int q) const;
  /// True when all elements share the flat front t.
  bool is_flat(double t, double tol = 0.0) const;

 private:
  const SpatialMesh* mesh_;
  int n_;
  int ne_;
  QuadRule rule_;
  bool with_potential_;
  std::vector<double> bary_;   // npts * (n + 1) barycentric coordinates
  std::vector<double> x_;      // ne * npts * n
  std::vector<double> w_;      // ne * npts
  std::vector<double> front_;  // ne * (n + 1)
  std::vector<double> values_;
};

/// Local solution of one tent restricted to one star element, kept for
/// evaluating U (or v, sigma) inside the tent afterwards.
struct TentPiece {
  int tent = -1;
  int element = -1;
  Localization where;
  Eigen::VectorXd coeffs;
  std::vector<double> bottom;  // vertex times, element order
  std::vector<double> top;
};

/// Everything one tent solve needs; shared read-only by all workers except
/// the trace store, whose element slots are written by one tent at a time.
struct TentContext {
  const SpatialMesh* mesh = nullptr;
  const TentSlab* slab = nullptr;
  std::vector<double> speeds;  // per element
  const FirstOrderTrefftzBasis* basis = nullptr;
  const TrefftzEvaluator* evaluator = nullptr;
  DGParams params;
  const Field* boundary = nullptr;  // g_D = v, g_N = sigma . n
  TraceStore* traces = nullptr;
  QuadRule facet_rule;  // spatial rule on time-like facets (segments for n = 2)
  QuadRule time_rule;
  double time_offset = 0.0;  // slab times are shifted by this amount
  /// Elements whose tent solutions are retained as TentPiece.
  std::vector<char> retain;
  std::function<void(TentPiece&&)> on_piece;
};

TentContext make_context(const SpatialMesh& mesh, const TentSlab& slab, const WavespeedMap& speeds,
                         const FirstOrderTrefftzBasis& basis, const TrefftzEvaluator& evaluator,
                         const DGParams& params, const Field& boundary, TraceStore& traces);

/// One block per material region of the tent, ordered by material id.
struct LocalSystem {
  int tent = -1;
  int block = 0;
  std::vector<int> materials;
  std::vector<Localization> where;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  int region_of_material(int material) const;
};

/// Anisotropic diameter of a region: the largest space-time distance between
/// its bottom and top vertices, time scaled by c.
double anisotropic_diameter(const SpatialMesh& mesh, const Tent& tent, const std::vector<int>& elements, double c,
                            double time_offset);

LocalSystem assemble_tent(const TentContext& ctx, const Tent& tent);

struct LocalSolution {
  Eigen::VectorXd x;
  double rcond = 0.0;
};

/// Dense LU with partial pivoting and a reciprocal condition estimate.
LocalSolution solve_local(const LocalSystem& sys);

/// Writes the tent's top traces into the store and hands retained pieces to
/// the context's collector.
void emit_traces(const TentContext& ctx, const Tent& tent, const LocalSystem& sys, const Eigen::VectorXd& x);

struct TentStats {
  double rcond = 1.0;
  int system_size = 0;
};

/// assemble_tent, solve_local and emit_traces in sequence.
TentStats solve_tent(const TentContext& ctx, const Tent& tent);

/// Evaluates a retained piece at a space-time point.
FieldValue eval_piece(const TentPiece& piece, const TrefftzEvaluator& evaluator, std::span<const double> x, double t);

}  // namespace ttdg

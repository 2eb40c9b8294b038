#include "ttdg/dg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace ttdg {

void DGParams::check() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::InvalidArgument, "alpha must be non-negative");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(ErrorKind::InvalidArgument, "beta must be non-negative");
}

TraceStore::TraceStore(const SpatialMesh& mesh, QuadRule rule, bool with_potential)
    : mesh_(&mesh), n_(mesh.dim()), ne_(mesh.num_elements()), rule_(std::move(rule)), with_potential_(with_potential) {
  if (rule_.n != n_) throw Error(ErrorKind::DimensionMismatch, "trace rule dimension differs from the mesh");
  const int np = rule_.size();
  bary_.resize(static_cast<std::size_t>(np) * (n_ + 1));
  for (int q = 0; q < np; ++q) {
    double s = 0.0;
    for (int d = 0; d < n_; ++d) {
      bary_[q * (n_ + 1) + d + 1] = rule_.point(q, d);
      s += rule_.point(q, d);
    }
    bary_[q * (n_ + 1)] = 1.0 - s;
  }
  x_.assign(static_cast<std::size_t>(ne_) * np * n_, 0.0);
  w_.assign(static_cast<std::size_t>(ne_) * np, 0.0);
  const double fact = n_ == 2 ? 2.0 : 1.0;
  for (int k = 0; k < ne_; ++k) {
    const auto e = mesh.element(k);
    const double jac = fact * mesh.volume(k);
    for (int q = 0; q < np; ++q) {
      for (int d = 0; d < n_; ++d) {
        double s = 0.0;
        for (int i = 0; i <= n_; ++i) s += bary_[q * (n_ + 1) + i] * mesh.vertex(e[i])[d];
        x_[(static_cast<std::size_t>(k) * np + q) * n_ + d] = s;
      }
      w_[static_cast<std::size_t>(k) * np + q] = rule_.weights[q] * jac;
    }
  }
  front_.assign(static_cast<std::size_t>(ne_) * (n_ + 1), 0.0);
  values_.assign(static_cast<std::size_t>(ne_) * np * values_per_point(), 0.0);
}

void TraceStore::initialize(const Field& field, double t0) {
  std::fill(front_.begin(), front_.end(), t0);
  const int np = rule_.size();
  const int nv = values_per_point();
  for (int k = 0; k < ne_; ++k) {
    const auto x = points(k);
    auto val = values(k);
    for (int q = 0; q < np; ++q) {
      const FieldValue f = field.eval(x.subspan(q * n_, n_), t0);
      val[q * nv] = f.v;
      for (int d = 0; d < n_; ++d) val[q * nv + 1 + d] = f.sigma[d];
      if (with_potential_) val[q * nv + n_ + 1] = f.U;
    }
  }
}

double TraceStore::time_at(int k, int q) const {
  const auto f = front(k);
  double t = 0.0;
  for (int i = 0; i <= n_; ++i) t += bary_[q * (n_ + 1) + i] * f[i];
  return t;
}

bool TraceStore::is_flat(double t, double tol) const {
  for (double f : front_) {
    if (std::abs(f - t) > tol) return false;
  }
  return true;
}

TentContext make_context(const SpatialMesh& mesh, const TentSlab& slab, const WavespeedMap& speeds,
                         const FirstOrderTrefftzBasis& basis, const TrefftzEvaluator& evaluator,
                         const DGParams& params, const Field& boundary, TraceStore& traces) {
  params.check();
  if (basis.n != mesh.dim() || evaluator.n() != mesh.dim() || traces.dim() != mesh.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "basis, traces and mesh dimensions differ");
  }
  if (params.recovery && !(evaluator.has_constant() && traces.with_potential())) {
    throw Error(ErrorKind::InvalidArgument, "recovery needs the constant member and stored potentials");
  }
  TentContext ctx;
  ctx.mesh = &mesh;
  ctx.slab = &slab;
  ctx.speeds = speeds.element_speeds(mesh);
  ctx.basis = &basis;
  ctx.evaluator = &evaluator;
  ctx.params = params;
  ctx.boundary = &boundary;
  ctx.traces = &traces;
  // products of two degree-p members need exactness 2p; one more for safety
  // on curved-in-time integrands of the boundary data
  const int m = basis.p + 2;
  ctx.facet_rule = gauss01(m);
  ctx.time_rule = gauss01(m);
  return ctx;
}

int LocalSystem::region_of_material(int material) const {
  for (std::size_t r = 0; r < materials.size(); ++r) {
    if (materials[r] == material) return static_cast<int>(r);
  }
  return -1;
}

double anisotropic_diameter(const SpatialMesh& mesh, const Tent& tent, const std::vector<int>& elements, double c,
                            double time_offset) {
  const int n = mesh.dim();
  std::vector<std::array<double, 4>> pts;
  for (int k : elements) {
    for (int u : mesh.element(k)) {
      std::array<double, 4> p{};
      for (int d = 0; d < n; ++d) p[d] = mesh.vertex(u)[d];
      if (u == tent.vertex) {
        p[3] = c * (tent.t_bottom + time_offset);
        pts.push_back(p);
        p[3] = c * (tent.t_top + time_offset);
      } else {
        p[3] = c * (tent.rim_time(u) + time_offset);
      }
      pts.push_back(p);
    }
  }
  double h2 = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double s = 0.0;
      for (int d = 0; d < 4; ++d) s += (pts[i][d] - pts[j][d]) * (pts[i][d] - pts[j][d]);
      h2 = std::max(h2, s);
    }
  }
  return std::sqrt(h2);
}

namespace {

// Matrix whose rows are sum_d a_d sigma_d of every member.
Eigen::MatrixXd sigma_dot(const BasisValues& b, int n, const std::array<double, 3>& a) {
  Eigen::MatrixXd out = a[0] * b.sigma[0];
  for (int d = 1; d < n; ++d) out += a[d] * b.sigma[d];
  return out;
}

std::vector<double> shifted(std::vector<double> t, double offset) {
  for (double& x : t) x += offset;
  return t;
}

// Times of the affine graph through `vertex_times` at the store's points.
std::vector<double> graph_at_points(const TraceStore& store, std::span<const double> vertex_times) {
  const int n = store.dim();
  const int np = store.points_per_element();
  const auto bary = store.barycentric();
  std::vector<double> t(np, 0.0);
  for (int q = 0; q < np; ++q) {
    for (int i = 0; i <= n; ++i) t[q] += bary[q * (n + 1) + i] * vertex_times[i];
  }
  return t;
}

}  // namespace

LocalSystem assemble_tent(const TentContext& ctx, const Tent& tent) {
  const SpatialMesh& mesh = *ctx.mesh;
  const TraceStore& store = *ctx.traces;
  const TrefftzEvaluator& ev = *ctx.evaluator;
  const DGParams& par = ctx.params;
  const int n = mesh.dim();
  const int m = ev.size();
  const int np = store.points_per_element();
  const int nvals = store.values_per_point();
  const double off = ctx.time_offset;

  std::map<int, std::vector<int>> regions;
  for (int k : tent.star) regions[mesh.material(k)].push_back(k);

  LocalSystem sys;
  sys.tent = tent.id;
  sys.block = m;
  const double t_center = off + 0.5 * (tent.t_top + tent.t_bottom);
  for (const auto& [mat, elems] : regions) {
    const double c = ctx.speeds[elems.front()];
    Localization where;
    for (int d = 0; d < n; ++d) where.center_x[d] = mesh.vertex(tent.vertex)[d];
    where.center_t = t_center;
    where.c = c;
    where.h = anisotropic_diameter(mesh, tent, elems, c, off);
    sys.materials.push_back(mat);
    sys.where.push_back(where);
  }
  const int nr = static_cast<int>(sys.materials.size());
  sys.A = Eigen::MatrixXd::Zero(nr * m, nr * m);
  sys.b = Eigen::VectorXd::Zero(nr * m);

  BasisValues top, bot, fa, fb;
  for (int r = 0; r < nr; ++r) {
    const Localization& where = sys.where[r];
    const double c = where.c;
    const double ic2 = 1.0 / (c * c);
    auto A = sys.A.block(r * m, r * m, m, m);
    auto b = sys.b.segment(r * m, m);

    for (int k : regions[sys.materials[r]]) {
      const auto bt = shifted(tent.bottom_times(mesh, k), off);
      const auto tt = shifted(tent.top_times(mesh, k), off);
      const auto front = store.front(k);
      for (int i = 0; i <= n; ++i) {
        if (std::abs(front[i] - bt[i]) > 1e-12 * std::max(1.0, std::abs(bt[i]))) {
          std::ostringstream msg;
          msg << "tent " << tent.id << ": stored front of element " << k << " is at " << front[i]
              << ", tent bottom expects " << bt[i];
          throw Error(ErrorKind::Scheduling, msg.str());
        }
      }
      const auto x = store.points(k);
      const auto w = store.weights(k);
      const Eigen::Map<const Eigen::VectorXd> W(w.data(), np);
      const auto vals = store.values(k);
      const bool need_pot = par.recovery;

      // top: outflow, unknown traces
      {
        const auto t = graph_at_points(store, tt);
        ev.eval(where, x, t, top, need_pot && par.recovery_face == RecoveryFace::Top);
        const auto g = graph_gradient(mesh, k, tt);
        // c^-2 V W V' + sum S_d W S_d' - G W V' - V W G' as one product
        // [V S_1 ..] diag(W) [c^-2 V - G, S_1 - g_1 V, ..]'
        const Eigen::MatrixXd G = sigma_dot(top, n, g);
        Eigen::MatrixXd X(m, (n + 1) * np), Y(m, (n + 1) * np);
        X.leftCols(np) = top.v * W.asDiagonal();
        Y.leftCols(np) = ic2 * top.v - G;
        for (int d = 0; d < n; ++d) {
          X.middleCols((d + 1) * np, np) = top.sigma[d] * W.asDiagonal();
          Y.middleCols((d + 1) * np, np) = top.sigma[d] - g[d] * top.v;
        }
        A.noalias() += X * Y.transpose();
        if (need_pot && par.recovery_face == RecoveryFace::Top) {
          double mu = 1.0;
          if (par.recovery_surface_measure) mu = std::sqrt(1.0 + g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
          A.noalias() += mu * top.potential * W.asDiagonal() * top.potential.transpose();
        }
      }
      // bottom: inflow, stored traces
      {
        std::vector<double> t(np);
        for (int q = 0; q < np; ++q) t[q] = store.time_at(k, q);
        ev.eval(where, x, t, bot, need_pot);
        const auto g = graph_gradient(mesh, k, bt);
        Eigen::VectorXd fv(np), fs(np);
        std::array<Eigen::VectorXd, 3> sig;
        for (int d = 0; d < n; ++d) sig[d].resize(np);
        Eigen::VectorXd fu(need_pot ? np : 0);
        for (int q = 0; q < np; ++q) {
          const double vq = vals[q * nvals];
          double sg = 0.0;
          for (int d = 0; d < n; ++d) {
            sig[d][q] = vals[q * nvals + 1 + d];
            sg += g[d] * sig[d][q];
          }
          fv[q] = W[q] * vq;
          fs[q] = W[q] * sg;
          if (need_pot) fu[q] = W[q] * vals[q * nvals + n + 1];
        }
        const Eigen::MatrixXd G = sigma_dot(bot, n, g);
        b.noalias() += ic2 * bot.v * fv;
        for (int d = 0; d < n; ++d) b.noalias() += bot.sigma[d] * sig[d].cwiseProduct(W);
        b.noalias() -= G * fv;
        b.noalias() -= bot.v * fs;
        if (need_pot) {
          double mu = 1.0;
          if (par.recovery_surface_measure) mu = std::sqrt(1.0 + g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
          b.noalias() += mu * bot.potential * fu;
          if (par.recovery_face == RecoveryFace::Bottom) {
            A.noalias() += mu * bot.potential * W.asDiagonal() * bot.potential.transpose();
          }
        }
      }

      // time-like facets through the pitch vertex
      const auto e = mesh.element(k);
      const auto grads = barycentric_gradients(n, mesh.element_coords(k));
      for (int l = 0; l <= n; ++l) {
        if (e[l] == tent.vertex) continue;
        const int nb = mesh.neighbor(k, l);
        if (nb >= 0 && mesh.material(nb) == mesh.material(k)) continue;
        if (nb >= 0 && mesh.material(nb) < mesh.material(k)) continue;  // assembled from the other side

        std::array<double, 3> nrm{};
        double len = 0.0;
        for (int d = 0; d < n; ++d) len += grads[l * n + d] * grads[l * n + d];
        len = std::sqrt(len);
        for (int d = 0; d < n; ++d) nrm[d] = -grads[l * n + d] / len;

        std::vector<double> fx, fbt, ftt;
        for (int i = 0; i <= n; ++i) {
          if (i == l) continue;
          for (int d = 0; d < n; ++d) fx.push_back(mesh.vertex(e[i])[d]);
          fbt.push_back(bt[i]);
          ftt.push_back(tt[i]);
        }
        const FaceQuadrature fq = map_to_timelike_facet(fx, fbt, ftt, ctx.facet_rule, ctx.time_rule);
        const int nq = fq.size();
        if (nq == 0) continue;
        const Eigen::Map<const Eigen::VectorXd> FW(fq.w.data(), nq);

        if (nb < 0) {
          const auto marker = mesh.boundary_marker(k, l);
          if (!marker) throw Error(ErrorKind::MeshInvariant, "boundary facet without a marker");
          ev.eval(where, fq.x, fq.t, fa, false);
          const Eigen::MatrixXd Sn = sigma_dot(fa, n, nrm);
          Eigen::VectorXd gw(nq);
          for (int q = 0; q < nq; ++q) {
            const FieldValue f = ctx.boundary->eval(std::span<const double>(fq.x).subspan(q * n, n), fq.t[q]);
            if (*marker == BoundaryMarker::Dirichlet) {
              gw[q] = FW[q] * f.v;
            } else {
              double s = 0.0;
              for (int d = 0; d < n; ++d) s += f.sigma[d] * nrm[d];
              gw[q] = FW[q] * s;
            }
          }
          if (*marker == BoundaryMarker::Dirichlet) {
            const Eigen::MatrixXd VW = fa.v * FW.asDiagonal();
            A.noalias() += VW * (Sn + par.alpha * fa.v).transpose();
            b.noalias() += (par.alpha * fa.v - Sn) * gw;
          } else {
            const Eigen::MatrixXd SW = Sn * FW.asDiagonal();
            A.noalias() += SW * (fa.v + par.beta * Sn).transpose();
            b.noalias() += (par.beta * Sn - fa.v) * gw;
          }
          continue;
        }

        // material interface: K is the "+" side (smaller material id)
        const int rb = sys.region_of_material(mesh.material(nb));
        const Localization& wb = sys.where[rb];
        ev.eval(where, fq.x, fq.t, fa, false);
        ev.eval(wb, fq.x, fq.t, fb, false);
        const std::array<const BasisValues*, 2> side{&fa, &fb};
        const std::array<int, 2> reg{r, rb};
        const std::array<double, 2> sgn{1.0, -1.0};
        std::array<Eigen::MatrixXd, 2> Sn{sigma_dot(fa, n, nrm), sigma_dot(fb, n, nrm)};
        for (int Y = 0; Y < 2; ++Y) {
          for (int X = 0; X < 2; ++X) {
            const Eigen::MatrixXd& VY = side[Y]->v;
            const Eigen::MatrixXd& VX = side[X]->v;
            auto blk = sys.A.block(reg[Y] * m, reg[X] * m, m, m);
            const double sy = sgn[Y];
            const double sxy = sgn[X] * sgn[Y];
            blk.noalias() += 0.5 * sy * (Sn[Y] * FW.asDiagonal() * VX.transpose());
            blk.noalias() += 0.5 * sy * (VY * FW.asDiagonal() * Sn[X].transpose());
            blk.noalias() += par.alpha * sxy * (VY * FW.asDiagonal() * VX.transpose());
            blk.noalias() += par.beta * sxy * (Sn[Y] * FW.asDiagonal() * Sn[X].transpose());
          }
        }
      }
    }
  }
  return sys;
}

LocalSolution solve_local(const LocalSystem& sys) {
  if (sys.A.rows() != sys.A.cols() || sys.A.rows() != sys.b.size()) {
    throw Error(ErrorKind::DimensionMismatch, "local system is not square");
  }
  LocalSolution out;
  if (sys.A.rows() == 0) return out;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.A);
  out.rcond = lu.rcond();
  out.x = lu.solve(sys.b);
  if (!(out.rcond > 1e-300) || !std::isfinite(out.rcond) || !out.x.allFinite()) {
    std::ostringstream msg;
    msg << "local system of tent " << sys.tent << " is singular (rcond " << out.rcond << ")";
    throw Error(ErrorKind::SingularMatrix, msg.str());
  }
  return out;
}

void emit_traces(const TentContext& ctx, const Tent& tent, const LocalSystem& sys, const Eigen::VectorXd& x) {
  const SpatialMesh& mesh = *ctx.mesh;
  TraceStore& store = *ctx.traces;
  const int n = mesh.dim();
  const int m = sys.block;
  const int np = store.points_per_element();
  const int nvals = store.values_per_point();
  const double off = ctx.time_offset;
  BasisValues top;
  for (int k : tent.star) {
    const int r = sys.region_of_material(mesh.material(k));
    const auto coeffs = x.segment(r * m, m);
    const auto tt = shifted(tent.top_times(mesh, k), off);
    const auto t = graph_at_points(store, tt);
    ctx.evaluator->eval(sys.where[r], store.points(k), t, top, store.with_potential());
    const Eigen::VectorXd v = top.v.transpose() * coeffs;
    auto vals = store.values(k);
    for (int q = 0; q < np; ++q) vals[q * nvals] = v[q];
    for (int d = 0; d < n; ++d) {
      const Eigen::VectorXd s = top.sigma[d].transpose() * coeffs;
      for (int q = 0; q < np; ++q) vals[q * nvals + 1 + d] = s[q];
    }
    if (store.with_potential()) {
      const Eigen::VectorXd u = top.potential.transpose() * coeffs;
      for (int q = 0; q < np; ++q) vals[q * nvals + n + 1] = u[q];
    }
    auto front = store.front(k);
    for (int i = 0; i <= n; ++i) front[i] = tt[i];

    if (!ctx.retain.empty() && ctx.retain[k] && ctx.on_piece) {
      TentPiece piece;
      piece.tent = tent.id;
      piece.element = k;
      piece.where = sys.where[r];
      piece.coeffs = coeffs;
      piece.bottom = shifted(tent.bottom_times(mesh, k), off);
      piece.top = tt;
      ctx.on_piece(std::move(piece));
    }
  }
}

TentStats solve_tent(const TentContext& ctx, const Tent& tent) {
  const LocalSystem sys = assemble_tent(ctx, tent);
  const LocalSolution sol = solve_local(sys);
  emit_traces(ctx, tent, sys, sol.x);
  return {sol.rcond, static_cast<int>(sys.A.rows())};
}

FieldValue eval_piece(const TentPiece& piece, const TrefftzEvaluator& evaluator, std::span<const double> x, double t) {
  BasisValues b;
  const double tt[1] = {t};
  evaluator.eval(piece.where, x, tt, b, true);
  FieldValue f;
  f.v = b.v.col(0).dot(piece.coeffs);
  for (int d = 0; d < evaluator.n(); ++d) f.sigma[d] = b.sigma[d].col(0).dot(piece.coeffs);
  f.U = b.potential.col(0).dot(piece.coeffs);
  return f;
}

}  // namespace ttdg

#include "ttdg/slab.hpp"

#include <chrono>
#include <cmath>

namespace ttdg {

const char* to_string(SpaceKind kind) { return kind == SpaceKind::Trefftz ? "trefftz" : "fullpoly"; }

SpaceKind parse_space_kind(const std::string& name) {
  if (name == "trefftz" || name == "W") return SpaceKind::Trefftz;
  if (name == "fullpoly" || name == "full" || name == "Q") return SpaceKind::FullPoly;
  throw Error(ErrorKind::InvalidArgument, "unknown space kind '" + name + "'");
}

SlabSpace::SlabSpace(SpaceKind kind, int p, SeedKind seed, double c) : kind_(kind), p_(p), c_(c) {
  if (p < 0) throw Error(ErrorKind::InvalidArgument, "p must be non-negative");
  if (!(c > 0.0)) throw Error(ErrorKind::InvalidArgument, "wavespeed must be positive");
  if (kind == SpaceKind::Trefftz) {
    basis_ = std::make_unique<FirstOrderTrefftzBasis>(build_first_order_basis(p, 1, seed));
    trefftz_ = std::make_unique<TrefftzEvaluator>(*basis_, false);
    size_ = trefftz_->size();
  } else {
    size_ = 2 * (p + 1) * (p + 1);
  }
}

void SlabSpace::eval(double xc, double tc, double hx, double ht, std::span<const double> x, std::span<const double> t,
                     Values& out, bool derivatives) const {
  const int np = static_cast<int>(t.size());
  if (kind_ == SpaceKind::Trefftz) {
    Localization where;
    where.center_x[0] = xc;
    where.center_t = tc;
    where.c = c_;
    where.h = std::sqrt(hx * hx + c_ * c_ * ht * ht);
    BasisValues b;
    trefftz_->eval(where, x, t, b, false);
    out.v = std::move(b.v);
    out.s = std::move(b.sigma[0]);
    return;
  }
  const int q = p_ + 1;
  const int half = q * q;
  out.v = Eigen::MatrixXd::Zero(size_, np);
  out.s = Eigen::MatrixXd::Zero(size_, np);
  if (derivatives) {
    for (auto* m : {&out.v_x, &out.v_t, &out.s_x, &out.s_t}) *m = Eigen::MatrixXd::Zero(size_, np);
  }
  std::vector<double> px(q), pt(q), dx(q), dt(q);
  for (int k = 0; k < np; ++k) {
    const double sx = 2.0 * (x[k] - xc) / hx;
    const double st = 2.0 * (t[k] - tc) / ht;
    px[0] = pt[0] = 1.0;
    dx[0] = dt[0] = 0.0;
    for (int a = 1; a < q; ++a) {
      px[a] = px[a - 1] * sx;
      pt[a] = pt[a - 1] * st;
      dx[a] = a * px[a - 1] * 2.0 / hx;
      dt[a] = a * pt[a - 1] * 2.0 / ht;
    }
    for (int a = 0; a < q; ++a) {
      for (int b = 0; b < q; ++b) {
        const int r = a * q + b;
        const double val = px[a] * pt[b];
        out.v(r, k) = val;
        out.s(half + r, k) = val;
        if (derivatives) {
          out.v_x(r, k) = dx[a] * pt[b];
          out.v_t(r, k) = px[a] * dt[b];
          out.s_x(half + r, k) = dx[a] * pt[b];
          out.s_t(half + r, k) = px[a] * dt[b];
        }
      }
    }
  }
}

Eigen::VectorXd BlockSystem::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(size());
  for (int k = 0; k < num_blocks(); ++k) {
    auto yk = y.segment(k * block, block);
    yk.noalias() += diag[k] * x.segment(k * block, block);
    for (const auto& [j, A] : off[k]) yk.noalias() += A * x.segment(j * block, block);
  }
  return y;
}

Eigen::MatrixXd BlockSystem::dense() const {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(size(), size());
  for (int k = 0; k < num_blocks(); ++k) {
    A.block(k * block, k * block, block, block) = diag[k];
    for (const auto& [j, B] : off[k]) A.block(k * block, j * block, block, block) += B;
  }
  return A;
}

Eigen::MatrixXd volume_matrix(const SlabSpace& space, double xc, double tc, double hx, double ht, double c, int p) {
  const QuadRule vol = gauss01(p + 2);
  const int nv = vol.size();
  std::vector<double> vx, vt;
  Eigen::VectorXd vw(nv * nv);
  for (int qa = 0; qa < nv; ++qa) {
    for (int qb = 0; qb < nv; ++qb) {
      vx.push_back(xc + hx * (vol.point(qa, 0) - 0.5));
      vt.push_back(tc + ht * (vol.point(qb, 0) - 0.5));
      vw[qa * nv + qb] = hx * ht * vol.weights[qa] * vol.weights[qb];
    }
  }
  SlabSpace::Values a;
  space.eval(xc, tc, hx, ht, vx, vt, a, true);
  if (space.kind() == SpaceKind::Trefftz) return Eigen::MatrixXd::Zero(space.size(), space.size());
  const Eigen::MatrixXd tv = a.s_x + (1.0 / (c * c)) * a.v_t;
  const Eigen::MatrixXd ts = a.s_t + a.v_x;
  return -(tv * vw.asDiagonal() * a.v.transpose() + ts * vw.asDiagonal() * a.s.transpose());
}

namespace {

Eigen::MatrixXd& coupling(BlockSystem& sys, int row, int col) {
  if (row == col) return sys.diag[row];
  for (auto& [j, A] : sys.off[row]) {
    if (j == col) return A;
  }
  sys.off[row].emplace_back(col, Eigen::MatrixXd::Zero(sys.block, sys.block));
  return sys.off[row].back().second;
}

}  // namespace

BlockSystem assemble_slab(const CartesianSlab& slab, const SlabSpace& space, const Field& bottom,
                          const Field& boundary, const DGParams& params, SlabBoundary markers) {
  params.check();
  if (slab.nx < 1 || slab.nt < 1 || !(slab.dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "empty slab");
  const int m = space.size();
  const int ne = slab.num_elements();
  const double hx = slab.hx();
  const double ht = slab.dt;
  const double ic2 = 1.0 / (slab.c * slab.c);
  BlockSystem sys;
  sys.block = m;
  sys.diag.assign(ne, Eigen::MatrixXd::Zero(m, m));
  sys.off.assign(ne, {});
  sys.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ne) * m);

  const QuadRule face = gauss01(slab.p + 3);
  const QuadRule vol = gauss01(slab.p + 2);
  const int nf = face.size();
  auto center = [&](int i, int j) { return std::pair{(i + 0.5) * hx, slab.t0 + (j + 0.5) * ht}; };
  auto eval_at = [&](int i, int j, std::span<const double> x, std::span<const double> t, SlabSpace::Values& out,
                     bool deriv) {
    const auto [xc, tc] = center(i, j);
    space.eval(xc, tc, hx, ht, x, t, out, deriv);
  };

  SlabSpace::Values a, b;
  std::vector<double> fx(nf), ft(nf);
  Eigen::VectorXd fw(nf);

  for (int j = 0; j < slab.nt; ++j) {
    for (int i = 0; i < slab.nx; ++i) {
      const int K = slab.index(i, j);
      const double x0 = i * hx;
      const double tb = slab.t0 + j * ht;
      const double tt = tb + ht;

      // horizontal faces: top of K (outflow, or upwind into the element above)
      for (int q = 0; q < nf; ++q) {
        fx[q] = x0 + hx * face.point(q, 0);
        ft[q] = tt;
        fw[q] = hx * face.weights[q];
      }
      eval_at(i, j, fx, ft, a, false);
      const Eigen::MatrixXd mass = ic2 * a.v * fw.asDiagonal() * a.v.transpose() + a.s * fw.asDiagonal() * a.s.transpose();
      sys.diag[K] += mass;
      if (j + 1 < slab.nt) {
        eval_at(i, j + 1, fx, ft, b, false);
        coupling(sys, slab.index(i, j + 1), K) -=
            ic2 * b.v * fw.asDiagonal() * a.v.transpose() + b.s * fw.asDiagonal() * a.s.transpose();
      }
      if (j == 0) {
        for (int q = 0; q < nf; ++q) ft[q] = tb;
        eval_at(i, j, fx, ft, a, false);
        Eigen::VectorXd gv(nf), gs(nf);
        for (int q = 0; q < nf; ++q) {
          const double xq[1] = {fx[q]};
          const FieldValue f = bottom.eval(xq, tb);
          gv[q] = fw[q] * f.v;
          gs[q] = fw[q] * f.sigma[0];
        }
        sys.rhs.segment(K * m, m) += ic2 * a.v * gv + a.s * gs;
      }

      // vertical face on the left of K
      for (int q = 0; q < nf; ++q) {
        fx[q] = x0;
        ft[q] = tb + ht * face.point(q, 0);
        fw[q] = ht * face.weights[q];
      }
      if (i > 0) {
        const int L = slab.index(i - 1, j);
        eval_at(i - 1, j, fx, ft, a, false);
        eval_at(i, j, fx, ft, b, false);
        const std::array<const SlabSpace::Values*, 2> side{&a, &b};
        const std::array<int, 2> id{L, K};
        const std::array<double, 2> sg{1.0, -1.0};
        for (int Y = 0; Y < 2; ++Y) {
          for (int X = 0; X < 2; ++X) {
            const auto& y = *side[Y];
            const auto& x = *side[X];
            Eigen::MatrixXd& blk = coupling(sys, id[Y], id[X]);
            blk += 0.5 * sg[Y] * (y.s * fw.asDiagonal() * x.v.transpose() + y.v * fw.asDiagonal() * x.s.transpose());
            blk += sg[X] * sg[Y] *
                   (params.alpha * y.v * fw.asDiagonal() * x.v.transpose() +
                    params.beta * y.s * fw.asDiagonal() * x.s.transpose());
          }
        }
      }
      // domain boundary faces
      for (int side = 0; side < 2; ++side) {
        if ((side == 0 && i != 0) || (side == 1 && i != slab.nx - 1)) continue;
        const double xb = side == 0 ? 0.0 : 1.0;
        const double nrm = side == 0 ? -1.0 : 1.0;
        const BoundaryMarker marker = side == 0 ? markers.left : markers.right;
        for (int q = 0; q < nf; ++q) fx[q] = xb;
        eval_at(i, j, fx, ft, a, false);
        const Eigen::MatrixXd Sn = nrm * a.s;
        Eigen::VectorXd g(nf);
        for (int q = 0; q < nf; ++q) {
          const double xq[1] = {xb};
          const FieldValue f = boundary.eval(xq, ft[q]);
          g[q] = fw[q] * (marker == BoundaryMarker::Dirichlet ? f.v : f.sigma[0] * nrm);
        }
        if (marker == BoundaryMarker::Dirichlet) {
          sys.diag[K] += a.v * fw.asDiagonal() * (Sn + params.alpha * a.v).transpose();
          sys.rhs.segment(K * m, m) += (params.alpha * a.v - Sn) * g;
        } else {
          sys.diag[K] += Sn * fw.asDiagonal() * (a.v + params.beta * Sn).transpose();
          sys.rhs.segment(K * m, m) += (params.beta * Sn - a.v) * g;
        }
      }

      // volume term of the non-Trefftz space
      if (space.kind() == SpaceKind::FullPoly) {
        const auto [xc, tc] = center(i, j);
        sys.diag[K] += volume_matrix(space, xc, tc, hx, ht, slab.c, slab.p);
      }
    }
  }
  return sys;
}

IterativeResult block_jacobi(const BlockSystem& sys, double tol, int maxit) {
  const int nb = sys.num_blocks();
  const int m = sys.block;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu;
  lu.reserve(nb);
  for (int k = 0; k < nb; ++k) {
    lu.emplace_back(sys.diag[k]);
    const double rc = lu.back().rcond();
    if (!(rc > 1e-300) || !std::isfinite(rc)) {
      throw Error(ErrorKind::SingularMatrix, "diagonal block " + std::to_string(k) + " is singular");
    }
  }
  IterativeResult res;
  res.x = Eigen::VectorXd::Zero(sys.size());
  const double bn = sys.rhs.norm();
  if (bn == 0.0) {
    res.converged = true;
    return res;
  }
  res.residual = 1.0;
  Eigen::VectorXd best = res.x;
  double best_res = 1.0;
  Eigen::VectorXd next(sys.size());
  for (int it = 1; it <= maxit; ++it) {
    for (int k = 0; k < nb; ++k) {
      Eigen::VectorXd r = sys.rhs.segment(k * m, m);
      for (const auto& [j, A] : sys.off[k]) r.noalias() -= A * res.x.segment(j * m, m);
      next.segment(k * m, m) = lu[k].solve(r);
    }
    res.x.swap(next);
    res.iterations = it;
    res.residual = (sys.rhs - sys.apply(res.x)).norm() / bn;
    if (res.residual < best_res) {
      best_res = res.residual;
      best = res.x;
    }
    if (res.residual <= tol) {
      res.converged = true;
      return res;
    }
    if (!std::isfinite(res.residual)) break;
  }
  res.x = best;
  res.residual = best_res;
  return res;
}

Eigen::VectorXd direct_solve(const BlockSystem& sys) {
  const Eigen::MatrixXd A = sys.dense();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double rc = lu.rcond();
  if (!(rc > 1e-300) || !std::isfinite(rc)) throw Error(ErrorKind::SingularMatrix, "slab system is singular");
  Eigen::VectorXd x = lu.solve(sys.rhs);
  if (!x.allFinite()) throw Error(ErrorKind::SingularMatrix, "slab system is singular");
  return x;
}

SlabSolution::SlabSolution(CartesianSlab slab, const SlabSpace& space, Eigen::VectorXd coeffs)
    : slab_(slab), space_(&space), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != static_cast<Eigen::Index>(slab_.num_elements()) * space.size()) {
    throw Error(ErrorKind::DimensionMismatch, "coefficient vector does not match the slab");
  }
}

FieldValue SlabSolution::eval(std::span<const double> x, double t) const {
  const double hx = slab_.hx();
  const int i = std::clamp(static_cast<int>(std::floor(x[0] / hx)), 0, slab_.nx - 1);
  const int j = std::clamp(static_cast<int>(std::floor((t - slab_.t0) / slab_.dt)), 0, slab_.nt - 1);
  SlabSpace::Values vals;
  const double xs[1] = {x[0]};
  const double ts[1] = {t};
  space_->eval((i + 0.5) * hx, slab_.t0 + (j + 0.5) * slab_.dt, hx, slab_.dt, xs, ts, vals, false);
  const auto c = coeffs_.segment(static_cast<Eigen::Index>(slab_.index(i, j)) * space_->size(), space_->size());
  FieldValue f;
  f.v = vals.v.col(0).dot(c);
  f.sigma[0] = vals.s.col(0).dot(c);
  return f;
}

CartesianResult run_cartesian(const CartesianRun& run, const Field& exact) {
  const auto start = std::chrono::steady_clock::now();
  if (run.nx < 1 || run.layers < 1 || !(run.T > 0.0)) throw Error(ErrorKind::InvalidArgument, "invalid Cartesian run");
  const SlabSpace space(run.kind, run.p, run.seed, run.c);
  const double h = 1.0 / run.nx;
  const double H = run.layers * h;
  const int nslabs = std::max(1, static_cast<int>(std::ceil(run.T / H - 1e-9)));
  CartesianResult res;
  res.dofs_per_element = space.size();
  res.slabs = nslabs;
  std::unique_ptr<SlabSolution> prev;
  for (int s = 0; s < nslabs; ++s) {
    CartesianSlab slab;
    slab.nx = run.nx;
    slab.nt = run.layers;
    slab.t0 = s * H;
    slab.dt = s == nslabs - 1 ? (run.T - slab.t0) / run.layers : h;
    slab.c = run.c;
    slab.p = run.p;
    slab.kind = run.kind;
    slab.seed = run.seed;
    const Field& bottom = prev ? static_cast<const Field&>(*prev) : exact;
    const BlockSystem sys = assemble_slab(slab, space, bottom, exact, run.params);
    Eigen::VectorXd x;
    if (run.solver == SlabSolver::Direct) {
      x = direct_solve(sys);
    } else {
      auto it = block_jacobi(sys, run.tol, run.maxit);
      res.iterations += it.iterations;
      res.converged = res.converged && it.converged;
      x = std::move(it.x);
    }
    res.dofs += sys.size();
    prev = std::make_unique<SlabSolution>(slab, space, std::move(x));
  }
  const QuadRule g = gauss01(run.p + 3);
  double e = 0.0;
  for (int i = 0; i < run.nx; ++i) {
    for (int q = 0; q < g.size(); ++q) {
      const double xq[1] = {(i + g.point(q, 0)) * h};
      const FieldValue a = prev->eval(xq, run.T);
      const FieldValue b = exact.eval(xq, run.T);
      e += h * g.weights[q] * ((a.v - b.v) * (a.v - b.v) / (run.c * run.c) + (a.sigma[0] - b.sigma[0]) * (a.sigma[0] - b.sigma[0]));
    }
  }
  res.error = std::sqrt(e);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace ttdg

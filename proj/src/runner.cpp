#include "ttdg/runner.hpp"

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>

namespace ttdg {

FrontSamples capture_front(const TraceStore& traces, const std::vector<double>& speeds, double t) {
  if (!traces.is_flat(t, 1e-9 * std::max(1.0, std::abs(t)))) {
    throw Error(ErrorKind::Scheduling, "front is not flat at the requested time");
  }
  FrontSamples f;
  f.n = traces.dim();
  f.num_elements = traces.num_elements();
  f.points_per_element = traces.points_per_element();
  f.values_per_point = traces.values_per_point();
  f.t = t;
  f.speed = speeds;
  for (int k = 0; k < f.num_elements; ++k) {
    const auto x = traces.points(k);
    const auto w = traces.weights(k);
    const auto v = traces.values(k);
    f.x.insert(f.x.end(), x.begin(), x.end());
    f.w.insert(f.w.end(), w.begin(), w.end());
    f.values.insert(f.values.end(), v.begin(), v.end());
  }
  return f;
}

double energy(const FrontSamples& front) {
  double e = 0.0;
  for (std::size_t i = 0; i < front.num_points(); ++i) {
    const double c = front.speed_at(i);
    double s = front.v(i) * front.v(i) / (c * c);
    for (int d = 0; d < front.n; ++d) s += front.sigma(i, d) * front.sigma(i, d);
    e += front.w[i] * s;
  }
  return 0.5 * e;
}

double energy(const FrontSamples& front, const Field& field) {
  double e = 0.0;
  for (std::size_t i = 0; i < front.num_points(); ++i) {
    const double c = front.speed_at(i);
    const FieldValue f = field.eval(front.point(i), front.t);
    double s = f.v * f.v / (c * c);
    for (int d = 0; d < front.n; ++d) s += f.sigma[d] * f.sigma[d];
    e += front.w[i] * s;
  }
  return 0.5 * e;
}

double final_error(const FrontSamples& front, const Field& exact) {
  if (front.num_points() == 0) throw Error(ErrorKind::InvalidArgument, "no final samples");
  double e = 0.0;
  for (std::size_t i = 0; i < front.num_points(); ++i) {
    const double c = front.speed_at(i);
    const FieldValue f = exact.eval(front.point(i), front.t);
    double s = (f.v - front.v(i)) * (f.v - front.v(i)) / (c * c);
    for (int d = 0; d < front.n; ++d) s += (f.sigma[d] - front.sigma(i, d)) * (f.sigma[d] - front.sigma(i, d));
    e += front.w[i] * s;
  }
  return std::sqrt(e);
}

double potential_error(const FrontSamples& front, const Field& exact) {
  if (!front.has_potential()) throw Error(ErrorKind::InvalidArgument, "front carries no potential (enable recovery)");
  double e = 0.0;
  for (std::size_t i = 0; i < front.num_points(); ++i) {
    const double d = exact.eval(front.point(i), front.t).U - front.U(i);
    e += front.w[i] * d * d;
  }
  return std::sqrt(e);
}

double energy_error(const FrontSamples& front, const Field& exact) {
  const double ex = energy(front, exact);
  if (!(ex > 0.0)) throw Error(ErrorKind::InvalidArgument, "exact energy vanishes");
  return std::abs(ex - energy(front)) / ex;
}

std::vector<TentStats> run_tents(const TentContext& ctx, int workers) {
  const TentSlab& slab = *ctx.slab;
  const int nt = static_cast<int>(slab.size());
  std::vector<TentStats> stats(nt);
  if (workers <= 1 || nt < 2) {
    for (int i = 0; i < nt; ++i) stats[i] = solve_tent(ctx, slab.tents[i]);
    return stats;
  }

  std::vector<int> waiting(nt, 0);
  std::vector<std::vector<int>> dependents(nt);
  std::vector<int> ready;
  for (int i = nt - 1; i >= 0; --i) {
    waiting[i] = static_cast<int>(slab.tents[i].deps.size());
    for (int d : slab.tents[i].deps) dependents[d].push_back(i);
    if (waiting[i] == 0) ready.push_back(i);
  }
  std::mutex mu;
  std::condition_variable cv;
  int done = 0;
  std::exception_ptr failure;

  auto work = [&] {
    std::unique_lock lock(mu);
    for (;;) {
      cv.wait(lock, [&] { return !ready.empty() || done == nt || failure; });
      if (done == nt || failure) return;
      const int i = ready.back();
      ready.pop_back();
      lock.unlock();
      TentStats s;
      std::exception_ptr err;
      try {
        s = solve_tent(ctx, slab.tents[i]);
      } catch (...) {
        err = std::current_exception();
      }
      lock.lock();
      if (err) {
        if (!failure) failure = err;
        cv.notify_all();
        return;
      }
      stats[i] = s;
      ++done;
      for (int j : dependents[i]) {
        if (--waiting[j] == 0) ready.push_back(j);
      }
      cv.notify_all();
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return stats;
}

namespace {

// Barycentric coordinates of x in element k.
std::array<double, 4> barycentric_of(const SpatialMesh& mesh, int k, std::span<const double> x) {
  const int n = mesh.dim();
  const auto grads = barycentric_gradients(n, mesh.element_coords(k));
  const auto e = mesh.element(k);
  std::array<double, 4> lam{};
  double s = 0.0;
  for (int i = 1; i <= n; ++i) {
    double l = 0.0;
    for (int d = 0; d < n; ++d) l += grads[i * n + d] * (x[d] - mesh.vertex(e[0])[d]);
    lam[i] = l;
    s += l;
  }
  lam[0] = 1.0 - s;
  return lam;
}

}  // namespace

SolutionRecord run_simulation(const ProblemSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  if (!spec.mesh) throw Error(ErrorKind::InvalidArgument, "problem has no mesh");
  if (!spec.initial || !spec.boundary) throw Error(ErrorKind::InvalidArgument, "problem needs initial and boundary data");
  if (spec.p < 0) throw Error(ErrorKind::InvalidArgument, "p must be non-negative");
  if (!(spec.T > 0.0)) throw Error(ErrorKind::InvalidArgument, "final time must be positive");
  spec.params.check();
  const SpatialMesh& mesh = *spec.mesh;
  const int n = mesh.dim();
  for (int m : mesh.materials()) {
    if (!spec.speeds.contains(m)) throw Error(ErrorKind::InvalidArgument, "no wavespeed for material " + std::to_string(m));
  }

  double height = spec.slab_height > 0.0 ? spec.slab_height : spec.T;
  int nslabs = static_cast<int>(std::ceil(spec.T / height - 1e-9));
  nslabs = std::max(nslabs, 1);
  const double last_height = spec.T - (nslabs - 1) * height;
  const TentSlab slab = pitch(mesh, spec.speeds, height, spec.gamma);
  TentSlab last_slab;
  const bool short_last = std::abs(last_height - height) > 1e-12 * height;
  if (short_last) last_slab = pitch(mesh, spec.speeds, last_height, spec.gamma);

  const auto basis = build_first_order_basis(spec.p, n, spec.seed);
  const TrefftzEvaluator evaluator(basis, spec.params.recovery);
  TraceStore traces(mesh, simplex_rule(n, 2 * spec.p + 2), spec.params.recovery);
  traces.initialize(*spec.initial, 0.0);

  SolutionRecord rec;
  rec.probes = spec.probes;
  std::vector<std::vector<int>> probes_of(mesh.num_elements());
  std::vector<std::array<double, 4>> probe_bary(rec.probes.size());
  for (std::size_t i = 0; i < rec.probes.size(); ++i) {
    Probe& pr = rec.probes[i];
    const std::span<const double> x(pr.x.data(), n);
    pr.element = mesh.locate(x, 1e-10);
    if (pr.element < 0) throw Error(ErrorKind::InvalidArgument, "probe point outside the domain");
    probes_of[pr.element].push_back(static_cast<int>(i));
    probe_bary[i] = barycentric_of(mesh, pr.element, x);
  }

  TentContext ctx = make_context(mesh, slab, spec.speeds, basis, evaluator, spec.params, *spec.boundary, traces);
  if (!rec.probes.empty()) {
    ctx.retain.assign(mesh.num_elements(), 0);
    for (int k = 0; k < mesh.num_elements(); ++k) ctx.retain[k] = !probes_of[k].empty();
    // Tents over one element are chained by dependencies, so the probes of
    // an element are never written concurrently.
    ctx.on_piece = [&](TentPiece&& piece) {
      for (int i : probes_of[piece.element]) {
        Probe& pr = rec.probes[i];
        double tb = 0.0, tt = 0.0;
        for (int j = 0; j <= n; ++j) {
          tb += probe_bary[i][j] * piece.bottom[j];
          tt += probe_bary[i][j] * piece.top[j];
        }
        // barycentric sums of equal vertex times can round below them
        const double tol = 1e-12 * std::max(1.0, std::abs(pr.t));
        if (!pr.found && pr.t >= tb - tol && pr.t <= tt + tol) {
          pr.value = eval_piece(piece, evaluator, std::span<const double>(pr.x.data(), n), pr.t);
          pr.found = true;
        }
      }
    };
  }

  if (spec.record_energy) rec.energy_series.emplace_back(0.0, energy(capture_front(traces, ctx.speeds, 0.0)));
  for (int s = 0; s < nslabs; ++s) {
    const double offset = s * height;
    const TentSlab& current = (s == nslabs - 1 && short_last) ? last_slab : slab;
    ctx.slab = &current;
    ctx.time_offset = offset;
    // snap the flat front to the exact offset so slab times line up
    if (!traces.is_flat(offset, 1e-9 * std::max(1.0, offset))) {
      throw Error(ErrorKind::Scheduling, "front is not flat between slabs");
    }
    for (int k = 0; k < mesh.num_elements(); ++k) {
      for (double& f : traces.front(k)) f = offset;
    }
    const auto stats = run_tents(ctx, spec.workers);
    for (const auto& st : stats) {
      rec.dofs += st.system_size;
      rec.min_rcond = std::min(rec.min_rcond, st.rcond);
      if (st.rcond < 1e-12) ++rec.ill_conditioned;
    }
    rec.tents += static_cast<long long>(current.size());
    rec.layers += static_cast<int>(current.layers.size());
    const double t_end = s == nslabs - 1 ? spec.T : offset + height;
    if (spec.record_energy) rec.energy_series.emplace_back(t_end, energy(capture_front(traces, ctx.speeds, t_end)));
  }
  for (int k = 0; k < mesh.num_elements(); ++k) {
    for (double& f : traces.front(k)) f = spec.T;
  }
  rec.slabs = nslabs;
  rec.final_front = capture_front(traces, ctx.speeds, spec.T);
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<Probe> make_box_probes(const BoxMeasurement& m) {
  if (m.g < 1) throw Error(ErrorKind::InvalidArgument, "measurement needs at least one point per direction");
  const QuadRule r = gauss01(m.g);
  std::vector<Probe> out;
  for (double t : m.times) {
    for (int i = 0; i < m.g; ++i) {
      for (int j = 0; j < m.g; ++j) {
        Probe p;
        p.x[0] = m.box[0] + (m.box[1] - m.box[0]) * r.point(i, 0);
        p.x[1] = m.box[2] + (m.box[3] - m.box[2]) * r.point(j, 0);
        p.t = t;
        out.push_back(p);
      }
    }
  }
  return out;
}

std::vector<std::pair<double, double>> measurement_UC(const BoxMeasurement& m, const std::vector<Probe>& probes) {
  const QuadRule r = gauss01(m.g);
  const std::size_t per = static_cast<std::size_t>(m.g) * m.g;
  if (probes.size() != per * m.times.size()) throw Error(ErrorKind::DimensionMismatch, "probe layout does not match");
  const double area = (m.box[1] - m.box[0]) * (m.box[3] - m.box[2]);
  std::vector<std::pair<double, double>> out;
  for (std::size_t s = 0; s < m.times.size(); ++s) {
    double sum = 0.0;
    for (int i = 0; i < m.g; ++i) {
      for (int j = 0; j < m.g; ++j) {
        const Probe& p = probes[s * per + i * m.g + j];
        if (!p.found) throw Error(ErrorKind::Scheduling, "probe was not reached by any tent");
        sum += r.weights[i] * r.weights[j] * std::abs(p.value.U);
      }
    }
    out.emplace_back(m.times[s], sum * area);
  }
  return out;
}

}  // namespace ttdg

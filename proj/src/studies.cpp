#include "ttdg/studies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>

namespace ttdg {

namespace {

using ColumnMap = std::map<MultiIndex, int, GradedOrder>;

// Coefficient vectors of several polynomials stacked into one row; each block
// of columns belongs to one component.
std::size_t coefficient_rank(const std::vector<std::vector<const SpaceTimePolynomial*>>& rows) {
  if (rows.empty()) return 0;
  const std::size_t ncomp = rows.front().size();
  std::vector<ColumnMap> cols(ncomp);
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < ncomp; ++c) {
      for (const auto& [m, a] : r[c]->coeffs()) cols[c].emplace(m, 0);
    }
  }
  int total = 0;
  for (auto& cm : cols) {
    for (auto& [m, j] : cm) j = total++;
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), total);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < ncomp; ++c) {
      for (const auto& [m, a] : rows[i][c]->coeffs()) A(i, cols[c].at(m)) = a;
    }
    const double s = A.row(i).cwiseAbs().maxCoeff();
    if (s > 0.0) A.row(i) /= s;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A.transpose());
  qr.setThreshold(1e-13);
  return static_cast<std::size_t>(qr.rank());
}

}  // namespace

BasisReport basis_report(int p, int n, SeedKind seed) {
  BasisReport r;
  r.p = p;
  r.n = n;
  r.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  const auto scalar = build_scalar_basis(p, n, seed);
  const auto fo = build_first_order_basis(p, n, seed);
  r.scalar_dim = scalar.members.size();
  r.first_order_dim = fo.members.size();

  std::vector<std::vector<const SpaceTimePolynomial*>> rows;
  for (const auto& m : scalar.members) {
    r.scalar_residual = std::max(r.scalar_residual, wave_residual(m, 1.0).max_abs_coeff() / m.max_abs_coeff());
    rows.push_back({&m});
  }
  r.scalar_rank = coefficient_rank(rows);

  rows.clear();
  for (const auto& m : fo.members) {
    double scale = m.v.max_abs_coeff();
    for (const auto& s : m.sigma) scale = std::max(scale, s.max_abs_coeff());
    auto div = derive(m.v, Axis::time());
    for (int d = 0; d < n; ++d) {
      div = div + derive(m.sigma[d], Axis::space(d));
      const auto g = derive(m.v, Axis::space(d)) + derive(m.sigma[d], Axis::time());
      r.first_order_residual = std::max(r.first_order_residual, g.max_abs_coeff() / scale);
    }
    r.first_order_residual = std::max(r.first_order_residual, div.max_abs_coeff() / scale);
    std::vector<const SpaceTimePolynomial*> row{&m.v};
    for (const auto& s : m.sigma) row.push_back(&s);
    rows.push_back(row);
  }
  r.first_order_rank = coefficient_rank(rows);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

SpatialMesh unit_mesh(int n, double h, BoundaryMarker marker) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "mesh size must be positive");
  if (n == 1) return make_interval_mesh(0.0, 1.0, std::max(1, static_cast<int>(std::lround(1.0 / h))), marker);
  if (n == 2) return make_square_mesh(h, marker);
  throw Error(ErrorKind::InvalidArgument, "unit meshes exist for n = 1, 2");
}

namespace {

ProblemSpec standing_problem(int n, double h, int p, const StudyOptions& opt) {
  ProblemSpec s;
  s.mesh = std::make_shared<SpatialMesh>(unit_mesh(n, h));
  const auto ex = standing_wave(n);
  s.initial = ex;
  s.boundary = ex;
  s.p = p;
  s.T = opt.T;
  s.gamma = opt.gamma;
  s.params = opt.params;
  s.seed = opt.seed;
  s.workers = opt.workers;
  return s;
}

template <class F>
double timed(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void csv_precision(std::ostream& out) { out.precision(10); }

}  // namespace

std::vector<ConvergenceRow> h_convergence(int n, const std::vector<int>& ps, const std::vector<double>& hs,
                                          const StudyOptions& opt) {
  std::vector<ConvergenceRow> rows;
  for (int p : ps) {
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const auto spec = standing_problem(n, hs[i], p, opt);
      const auto rec = run_simulation(spec);
      ConvergenceRow r;
      r.h = hs[i];
      r.p = p;
      r.dofs = rec.dofs;
      r.error = final_error(rec.final_front, *spec.initial);
      r.seconds = rec.seconds;
      if (i > 0) {
        const auto& prev = rows.back();
        r.rate = std::log(prev.error / r.error) / std::log(prev.h / r.h);
      }
      rows.push_back(r);
    }
  }
  return rows;
}

std::vector<ConvergenceRow> p_convergence(int n, double h, const std::vector<int>& ps, const StudyOptions& opt) {
  std::vector<ConvergenceRow> rows;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto spec = standing_problem(n, h, ps[i], opt);
    const auto rec = run_simulation(spec);
    ConvergenceRow r;
    r.h = h;
    r.p = ps[i];
    r.dofs = rec.dofs;
    r.error = final_error(rec.final_front, *spec.initial);
    r.seconds = rec.seconds;
    if (i > 0) r.rate = std::log2(rows.back().error / r.error);
    rows.push_back(r);
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
  csv_precision(out);
  out << "h,p,dofs,error,rate,seconds\n";
  for (const auto& r : rows) out << r.h << ',' << r.p << ',' << r.dofs << ',' << r.error << ',' << r.rate << ',' << r.seconds << '\n';
}

std::vector<SpaceRow> compare_spaces(double h, const std::vector<int>& ps, const StudyOptions& opt) {
  const auto ex = standing_wave(1);
  std::vector<SpaceRow> rows;
  for (int p : ps) {
    for (SpaceKind kind : {SpaceKind::Trefftz, SpaceKind::FullPoly}) {
      CartesianRun run;
      run.nx = std::max(1, static_cast<int>(std::lround(1.0 / h)));
      run.p = p;
      run.T = opt.T;
      run.kind = kind;
      run.seed = opt.seed;
      run.params = opt.params;
      const auto res = run_cartesian(run, *ex);
      if (!res.converged) throw Error(ErrorKind::NotConverged, "block Jacobi did not converge");
      rows.push_back({p, kind, res.dofs_per_element, res.dofs, res.error, res.seconds});
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<SpaceRow>& rows) {
  csv_precision(out);
  out << "p,space,dofs_per_element,dofs,error,seconds\n";
  for (const auto& r : rows) {
    out << r.p << ',' << to_string(r.kind) << ',' << r.dofs_per_element << ',' << r.dofs << ',' << r.error << ','
        << r.seconds << '\n';
  }
}

std::vector<MeshingRow> compare_meshing(const std::vector<double>& hs, const std::vector<int>& ps,
                                        const StudyOptions& opt) {
  const auto ex = standing_wave(1);
  std::vector<MeshingRow> rows;
  for (int p : ps) {
    for (double h : hs) {
      auto spec = standing_problem(1, h, p, opt);
      std::vector<int> counts{1};
      if (opt.workers > 1) counts.push_back(opt.workers);
      for (int w : counts) {
        spec.workers = w;
        const auto rec = run_simulation(spec);
        rows.push_back({"tents-" + std::to_string(w), h, p, rec.dofs, final_error(rec.final_front, *ex), 0, rec.seconds});
      }
      CartesianRun run;
      run.nx = std::max(1, static_cast<int>(std::lround(1.0 / h)));
      run.p = p;
      run.T = opt.T;
      run.params = opt.params;
      run.seed = opt.seed;
      const auto res = run_cartesian(run, *ex);
      if (!res.converged) throw Error(ErrorKind::NotConverged, "block Jacobi did not converge");
      rows.push_back({"slab-jacobi", h, p, res.dofs, res.error, res.iterations, res.seconds});
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<MeshingRow>& rows) {
  csv_precision(out);
  out << "method,h,p,dofs,error,iterations,seconds\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.h << ',' << r.p << ',' << r.dofs << ',' << r.error << ',' << r.iterations << ','
        << r.seconds << '\n';
  }
}

std::vector<SeedRow> seed_study(int n, double h, const std::vector<int>& ps, const StudyOptions& opt) {
  std::vector<SeedRow> rows;
  for (SeedKind kind : kAllSeedKinds) {
    for (int p : ps) {
      StudyOptions o = opt;
      o.seed = kind;
      const auto spec = standing_problem(n, h, p, o);
      SeedRow r;
      r.seed = kind;
      r.p = p;
      try {
        const auto rec = run_simulation(spec);
        r.error = final_error(rec.final_front, *spec.initial);
        r.condition = 1.0 / rec.min_rcond;
        r.seconds = rec.seconds;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularMatrix) throw;
        r.error = std::numeric_limits<double>::infinity();
        r.condition = std::numeric_limits<double>::infinity();
      }
      rows.push_back(r);
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<SeedRow>& rows) {
  csv_precision(out);
  out << "seed,p,error,condition,seconds\n";
  for (const auto& r : rows) {
    out << to_string(r.seed) << ',' << r.p << ',' << r.error << ',' << r.condition << ',' << r.seconds << '\n';
  }
}

std::vector<EnergyRow> energy_study(const std::vector<int>& ps, double T, double every, const StudyOptions& opt) {
  std::vector<EnergyRow> rows;
  const auto ex = sine_wave_1d();
  const double exact = std::numbers::pi * std::numbers::pi / 4.0;
  for (int p : ps) {
    ProblemSpec s;
    s.mesh = std::make_shared<SpatialMesh>(make_interval_mesh(0.0, 1.0, 5));
    s.initial = ex;
    s.boundary = zero_solution(1);
    s.p = p;
    s.T = T;
    s.gamma = opt.gamma;
    s.params = opt.params;
    s.seed = opt.seed;
    s.workers = opt.workers;
    s.slab_height = every;
    s.record_energy = true;
    const auto rec = run_simulation(s);
    for (const auto& [t, E] : rec.energy_series) rows.push_back({t, p, E, std::abs(exact - E) / exact});
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<EnergyRow>& rows) {
  out.precision(17);
  out << "t,p,E,relerr\n";
  for (const auto& r : rows) out << r.t << ',' << r.p << ',' << r.E << ',' << r.relerr << '\n';
}

LShapeRow lshape_run(double h_max, double mu, int p, const StudyOptions& opt) {
  ProblemSpec s;
  s.mesh = std::make_shared<SpatialMesh>(make_lshape_graded(h_max, mu));
  const auto ex = bessel_singular(10.0, 2.0 / 3.0);
  s.initial = ex;
  s.boundary = ex;
  s.p = p;
  s.T = opt.T;
  s.gamma = opt.gamma;
  s.params = opt.params;
  s.params.recovery = true;
  s.seed = opt.seed;
  s.workers = opt.workers;
  const auto rec = run_simulation(s);
  LShapeRow r;
  r.mesh = mu < 1.0 ? "graded" : "uniform";
  r.h_max = h_max;
  r.elements = s.mesh->num_elements();
  r.dofs = rec.dofs;
  r.error = potential_error(rec.final_front, *ex);
  r.seconds = rec.seconds;
  return r;
}

void fill_dof_rates(std::vector<LShapeRow>& rows) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].rate = 0.0;
    if (i == 0 || rows[i].mesh != rows[i - 1].mesh) continue;
    const auto& a = rows[i - 1];
    const auto& b = rows[i];
    rows[i].rate = std::log(a.error / b.error) / (std::log(double(b.dofs) / double(a.dofs)) / 3.0);
  }
}

void write_csv(std::ostream& out, const std::vector<LShapeRow>& rows) {
  csv_precision(out);
  out << "mesh,h_max,elements,dofs,error,rate,seconds\n";
  for (const auto& r : rows) {
    out << r.mesh << ',' << r.h_max << ',' << r.elements << ',' << r.dofs << ',' << r.error << ',' << r.rate << ','
        << r.seconds << '\n';
  }
}

SpatialMesh hetero_mesh(const HeteroSetup& s) {
  const int nx = static_cast<int>(std::lround(2.0 / s.h));
  const double hx = 2.0 / nx;
  const double cells_left = s.interface_x / hx;
  if (std::abs(cells_left - std::round(cells_left)) > 1e-9) {
    throw Error(ErrorKind::InvalidArgument, "mesh size does not align with the material interface");
  }
  const auto base = make_rectangle_mesh(0.0, 2.0, 0.0, 2.0, nx, nx);
  std::vector<int> mat(base.num_elements());
  for (int k = 0; k < base.num_elements(); ++k) mat[k] = base.centroid(k)[0] > s.interface_x ? 1 : 0;
  return SpatialMesh(2, base.coords(), base.elements(), mat, base.boundary());
}

HeteroResult hetero_run(const HeteroSetup& s, const StudyOptions& opt) {
  ProblemSpec spec;
  spec.mesh = std::make_shared<SpatialMesh>(hetero_mesh(s));
  spec.speeds = WavespeedMap({{0, s.c_left}, {1, s.c_right}});
  spec.initial = gaussian_pulse(s.source, s.delta);
  spec.boundary = zero_solution(2);
  spec.p = s.p;
  spec.T = s.T;
  spec.gamma = opt.gamma;
  spec.params = opt.params;
  spec.params.recovery = true;
  spec.seed = opt.seed;
  spec.workers = opt.workers;

  BoxMeasurement m;
  m.box = {s.receiver[0] - s.box_half, s.receiver[0] + s.box_half, s.receiver[1] - s.box_half,
           s.receiver[1] + s.box_half};
  m.g = s.box_points;
  const int nsamples = static_cast<int>(std::floor(s.T / s.dt_sample + 1e-9));
  for (int i = 0; i <= nsamples; ++i) m.times.push_back(i * s.dt_sample);
  spec.probes = make_box_probes(m);
  const std::size_t nbox = spec.probes.size();
  if (s.snapshot_grid > 0) {
    for (double t : s.snapshot_times) {
      for (int i = 0; i < s.snapshot_grid; ++i) {
        for (int j = 0; j < s.snapshot_grid; ++j) {
          Probe p;
          p.x = {2.0 * (i + 0.5) / s.snapshot_grid, 2.0 * (j + 0.5) / s.snapshot_grid, 0.0};
          p.t = t;
          spec.probes.push_back(p);
        }
      }
    }
  }
  const auto rec = run_simulation(spec);
  HeteroResult out;
  const std::vector<Probe> box(rec.probes.begin(), rec.probes.begin() + nbox);
  out.series = measurement_UC(m, box);
  for (std::size_t i = nbox; i < rec.probes.size(); ++i) {
    const Probe& p = rec.probes[i];
    out.snapshots.push_back({p.x[0], p.x[1], p.t, p.found ? p.value.U : std::nan("")});
  }
  out.tents = rec.tents;
  out.dofs = rec.dofs;
  out.seconds = rec.seconds;
  return out;
}

Arrivals ray_arrivals(std::array<double, 2> source, std::array<double, 2> receiver, double interface_x, double c1,
                      double c2) {
  if (!(c2 > c1)) throw Error(ErrorKind::InvalidArgument, "a head wave needs a faster second medium");
  Arrivals a;
  const double dx = receiver[0] - source[0];
  const double dy = receiver[1] - source[1];
  a.direct = std::hypot(dx, dy) / c1;
  // mirror the source in the interface
  const double mx = 2.0 * interface_x - source[0];
  a.reflected = std::hypot(receiver[0] - mx, dy) / c1;
  // critical refraction: legs at angle asin(c1 / c2) to the normal
  const double d1 = interface_x - source[0];
  const double d2 = interface_x - receiver[0];
  const double sin_c = c1 / c2;
  const double cos_c = std::sqrt(1.0 - sin_c * sin_c);
  const double along = std::abs(dy) - (d1 + d2) * sin_c / cos_c;
  if (along < 0.0) throw Error(ErrorKind::InvalidArgument, "receiver lies inside the critical distance");
  a.head = (d1 + d2) / (c1 * cos_c) + along / c2;
  return a;
}

std::vector<double> find_peaks(const std::vector<std::pair<double, double>>& series, double threshold, double min_gap) {
  double top = 0.0;
  for (const auto& [t, u] : series) top = std::max(top, u);
  std::vector<std::pair<double, double>> peaks;
  for (std::size_t i = 1; i + 1 < series.size(); ++i) {
    const double u = series[i].second;
    if (u > threshold * top && u >= series[i - 1].second && u > series[i + 1].second) {
      if (!peaks.empty() && series[i].first - peaks.back().first < min_gap) {
        if (u > peaks.back().second) peaks.back() = series[i];
      } else {
        peaks.push_back(series[i]);
      }
    }
  }
  std::vector<double> out;
  for (const auto& p : peaks) out.push_back(p.first);
  return out;
}

void write_csv(std::ostream& out, const std::vector<std::pair<double, double>>& measurement) {
  out.precision(12);
  out << "t,UC\n";
  for (const auto& [t, u] : measurement) out << t << ',' << u << '\n';
}

void write_snapshot_csv(std::ostream& out, const std::vector<std::array<double, 4>>& samples) {
  out.precision(10);
  out << "x,y,t,U\n";
  for (const auto& s : samples) out << s[0] << ',' << s[1] << ',' << s[2] << ',' << s[3] << '\n';
}

}  // namespace ttdg

// Acceptance report: one PASS/FAIL line per criterion. Exits nonzero only
// when a check could not be evaluated, or with --strict on any FAIL.
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "ttdg/studies.hpp"

using namespace ttdg;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x, int prec = 3) {
  std::ostringstream s;
  s << std::setprecision(prec) << x;
  return s.str();
}

std::size_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<std::size_t>(std::llround(r));
}

Outcome trefftz_property() {
  double worst_u = 0.0, worst_w = 0.0;
  for (int n = 1; n <= 3; ++n) {
    for (int p = 0; p <= 8; ++p) {
      for (SeedKind s : kAllSeedKinds) {
        const auto r = basis_report(p, n, s);
        worst_u = std::max(worst_u, r.scalar_residual);
        worst_w = std::max(worst_w, r.first_order_residual);
      }
    }
  }
  return {worst_u <= 1e-12 && worst_w <= 1e-12,
          "max relative residual U^p " + fmt(worst_u) + ", W^p " + fmt(worst_w) + " (bound 1e-12), p<=8, n<=3, all seeds"};
}

Outcome dimensions() {
  bool ok = true;
  std::string bad;
  for (int n = 1; n <= 3; ++n) {
    for (int p = 0; p <= 8; ++p) {
      const auto r = basis_report(p, n, SeedKind::Monomial);
      const std::size_t u = binom(p + n, n) + binom(p - 1 + n, n);
      const std::size_t w = binom(p + 1 + n, n) + binom(p + n, n) - 1;
      const bool here = r.scalar_dim == u && r.first_order_dim == w && r.scalar_rank == u && r.first_order_rank == w;
      if (!here && bad.empty()) bad = " first mismatch n=" + std::to_string(n) + " p=" + std::to_string(p);
      ok = ok && here;
    }
  }
  const auto a = basis_report(3, 1, SeedKind::Monomial);
  const auto b = basis_report(3, 2, SeedKind::Monomial);
  ok = ok && a.first_order_dim == 8 && b.first_order_dim == 24;
  return {ok, "formulas and full rank for p<=8, n<=3; |W^3| = " + std::to_string(a.first_order_dim) + " (n=1), " +
                  std::to_string(b.first_order_dim) + " (n=2, C(6,2)+C(5,2)-1 = 24)" + bad};
}

Outcome exact_reproduction() {
  double worst = 0.0;
  for (int n = 1; n <= 2; ++n) {
    for (int p = 1; p <= 3; ++p) {
      ProblemSpec s;
      s.mesh = std::make_shared<SpatialMesh>(unit_mesh(n, n == 1 ? 0.25 : 0.5));
      const auto ex = quadratic_wave(n);
      s.initial = ex;
      s.boundary = ex;
      s.p = p;
      s.T = 1.0;
      worst = std::max(worst, final_error(run_simulation(s).final_front, *ex));
    }
  }
  return {worst <= 1e-9, "max final error " + fmt(worst) + " (bound 1e-9) for x^2+t^2 and x1^2+x2^2+2t^2, p=1..3"};
}

Outcome h_convergence_check() {
  const auto t0 = std::chrono::steady_clock::now();
  StudyOptions opt;
  bool ok = true;
  std::string detail = "finest-pair rates:";
  const auto one = h_convergence(1, {1, 2, 3}, {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64}, opt);
  const auto two = h_convergence(2, {1, 2}, {1.0 / 4, 1.0 / 8, 1.0 / 16}, opt);
  for (const auto* rows : {&one, &two}) {
    for (std::size_t i = 0; i < rows->size(); ++i) {
      const auto& r = (*rows)[i];
      if (i + 1 < rows->size() && (*rows)[i + 1].p == r.p) continue;  // last row of each p
      ok = ok && r.rate >= r.p + 0.4;
      detail += " n=" + std::string(rows == &one ? "1" : "2") + ",p=" + std::to_string(r.p) + ": " + fmt(r.rate) +
                " (>=" + fmt(r.p + 0.4, 2) + ")";
    }
  }
  const double secs = seconds_since(t0);
  ok = ok && secs <= 180.0;
  return {ok, detail + "; " + fmt(secs) + " s (<=180)"};
}

Outcome p_convergence_check() {
  const auto rows = p_convergence(1, 0.25, {1, 2, 3, 4, 5, 6}, StudyOptions{});
  bool ok = true;
  for (std::size_t i = 1; i < rows.size(); ++i) ok = ok && rows[i].error < rows[i - 1].error;
  const double drop = rows.front().error / rows.back().error;
  ok = ok && drop >= 1e4;
  return {ok, "errors p=1 " + fmt(rows.front().error) + " -> p=6 " + fmt(rows.back().error) + ", strictly decreasing " +
                  (ok ? "yes" : "no") + ", drop " + fmt(drop) + " (>=1e4)"};
}

Outcome space_comparison() {
  const auto rows = compare_spaces(0.25, {1, 2, 3, 4}, StudyOptions{});
  bool ok = true;
  std::string detail = "error ratio W/Q per p:";
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
    const auto& w = rows[i];
    const auto& q = rows[i + 1];
    const double ratio = w.error / q.error;
    ok = ok && std::max(ratio, 1.0 / ratio) <= 3.0;
    ok = ok && w.dofs_per_element == 2 * w.p + 2 && q.dofs_per_element == 2 * (q.p + 1) * (q.p + 1);
    detail += " " + fmt(ratio) + " (" + std::to_string(w.dofs_per_element) + " vs " +
              std::to_string(q.dofs_per_element) + " dofs)";
  }
  return {ok, detail + "; agreement required within factor 3"};
}

Outcome solver_equivalence() {
  // block Jacobi against a dense solve on one 4x4 slab
  CartesianSlab slab;
  slab.nx = 4;
  slab.nt = 4;
  slab.dt = 0.25;
  slab.p = 3;
  const SlabSpace space(slab.kind, slab.p, slab.seed, slab.c);
  const auto ex = standing_wave(1);
  const auto sys = assemble_slab(slab, space, *ex, *ex, DGParams{});
  const auto it = block_jacobi(sys, 1e-10, 10000);
  const Eigen::VectorXd direct = direct_solve(sys);
  const double rel = (it.x - direct).norm() / direct.norm();
  bool ok = it.converged && rel <= 1e-8;
  std::string detail = "jacobi vs direct rel diff " + fmt(rel) + " (<=1e-8, " + std::to_string(it.iterations) + " its)";

  for (int p : {2, 3}) {
    StudyOptions opt;
    const auto tents = h_convergence(1, {p}, {0.125}, opt).front();
    CartesianRun run;
    run.nx = 8;
    run.p = p;
    const auto cart = run_cartesian(run, *ex);
    const double ratio = tents.error / cart.error;
    ok = ok && cart.converged && std::abs(ratio - 1.0) <= 0.2;
    detail += "; p=" + std::to_string(p) + " tent/slab error ratio " + fmt(ratio) + " (within 20%)";
  }
  return {ok, detail};
}

Outcome determinism_and_speedup() {
  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = 4;
  ProblemSpec s;
  s.mesh = std::make_shared<SpatialMesh>(unit_mesh(2, 0.05));
  const auto ex = standing_wave(2);
  s.initial = ex;
  s.boundary = ex;
  s.p = 2;
  s.T = 1.0;
  s.workers = 1;
  const auto a = run_simulation(s);
  s.workers = workers;
  const auto b = run_simulation(s);
  const bool same = a.final_front.values == b.final_front.values && a.dofs == b.dofs && a.tents == b.tents &&
                    a.min_rcond == b.min_rcond;
  const double speedup = a.seconds / b.seconds;
  std::string detail = std::to_string(a.tents) + " tents, records " + (same ? "identical" : "DIFFER") +
                       " for 1 vs " + std::to_string(workers) + " workers; speedup " + fmt(speedup) + "x on " +
                       std::to_string(hw) + " hardware threads";
  if (hw < static_cast<unsigned>(workers)) {
    detail += " (speedup target 2x not measurable here, soft)";
  } else if (speedup < 2.0) {
    detail += " (below the soft 2x target)";
  }
  return {same && a.tents >= 10000, detail};
}

Outcome energy_check() {
  const auto t0 = std::chrono::steady_clock::now();
  StudyOptions opt;
  opt.T = 100.0;
  bool monotone = true;
  std::vector<double> e10, e100;
  for (int p = 2; p <= 8; ++p) {
    const auto rows = energy_study({p}, 100.0, 1.0, opt);
    for (std::size_t i = 1; i < rows.size(); ++i) monotone = monotone && rows[i].E <= rows[i - 1].E * (1.0 + 1e-12);
    for (const auto& r : rows) {
      if (std::abs(r.t - 10.0) < 1e-9) e10.push_back(r.relerr);
      if (std::abs(r.t - 100.0) < 1e-9) e100.push_back(r.relerr);
    }
  }
  bool decreasing = e100.size() == 7;
  for (std::size_t i = 1; i < e100.size(); ++i) decreasing = decreasing && e100[i] < e100[i - 1];
  const double drop = e100.front() / e100.back();
  // the time-growth bound is read on errors above the roundoff floor
  bool linear = true;
  std::string ratios;
  for (std::size_t i = 0; i < e10.size(); ++i) {
    const double r = e100[i] / e10[i];
    const bool resolved = e10[i] >= 1e-12;
    if (resolved) linear = linear && r <= 15.0;
    ratios += " p" + std::to_string(i + 2) + ":" + fmt(r, 2) + (resolved ? "" : "*");
  }
  const double secs = seconds_since(t0);
  const bool ok = monotone && decreasing && drop >= 1e3 && linear && secs <= 120.0;
  return {ok, std::string("energy non-increasing ") + (monotone ? "yes" : "no") + "; err(T=100) decreasing p=2..8 " +
                  (decreasing ? "yes" : "no") + ", drop " + fmt(drop) + " (>=1e3); err(100)/err(10)" + ratios +
                  " (<=15; * = at roundoff, not bounded); " + fmt(secs) + " s (<=120)"};
}

Outcome lshape_check() {
  const auto t0 = std::chrono::steady_clock::now();
  StudyOptions opt;
  std::vector<LShapeRow> rows;
  for (double h : {0.1, 0.07, 0.05}) rows.push_back(lshape_run(h, 1.0, 3, opt));
  for (double h : {0.25, 0.2, 0.16, 0.13}) rows.push_back(lshape_run(h, 1.0 / 3.0, 3, opt));
  fill_dof_rates(rows);
  // least-squares slope of log error against log dofs^(-1/3) per series
  auto slope = [&](const std::string& mesh) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& r : rows) {
      if (r.mesh != mesh) continue;
      const double x = -std::log(static_cast<double>(r.dofs)) / 3.0, y = std::log(r.error);
      sx += x, sy += y, sxx += x * x, sxy += x * y, ++m;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
  };
  const double su = slope("uniform");
  const double sg = slope("graded");
  std::string pairs;
  for (const auto& r : rows) {
    if (r.rate != 0.0) pairs += " " + r.mesh.substr(0, 1) + fmt(r.h_max, 2) + ":" + fmt(r.rate);
  }
  const double f07 = rows[1].error / 0.0178, f05 = rows[2].error / 0.0117;
  auto within3 = [](double f) { return f >= 1.0 / 3.0 && f <= 3.0; };
  const double secs = seconds_since(t0);
  const bool ok = su >= 0.8 && su <= 1.6 && sg >= 3.0 && within3(f07) && within3(f05) && secs <= 300.0;
  return {ok, "dof-rate uniform " + fmt(su) + " (in [0.8,1.6]), graded " + fmt(sg) + " (>=3); pairwise" + pairs +
                  "; uniform error / reference at h=0.07: " + fmt(f07) + ", h=0.05: " + fmt(f05) + " (within 3x); " +
                  fmt(secs) + " s (<=300)"};
}

Outcome hetero_check() {
  const auto t0 = std::chrono::steady_clock::now();
  HeteroSetup setup;  // h = 0.05, p = 4
  const auto res = hetero_run(setup, StudyOptions{});
  const auto oracle = ray_arrivals(setup.source, setup.receiver, setup.interface_x, setup.c_left, setup.c_right);
  const auto peaks = find_peaks(res.series, 0.05, 0.03);
  std::vector<double> matched;
  std::vector<char> used(peaks.size(), 0);
  bool ok = true;
  for (double t : {oracle.head, oracle.direct, oracle.reflected}) {
    int best = -1;
    for (std::size_t i = 0; i < peaks.size(); ++i) {
      if (used[i] || std::abs(peaks[i] - t) > 0.05) continue;
      if (best < 0 || std::abs(peaks[i] - t) < std::abs(peaks[best] - t)) best = static_cast<int>(i);
    }
    if (best < 0) {
      ok = false;
      matched.push_back(std::nan(""));
      continue;
    }
    used[best] = 1;
    matched.push_back(peaks[best]);
  }
  ok = ok && matched[0] < matched[1] && matched[1] < matched[2];
  std::string found;
  for (double p : peaks) found += " " + fmt(p);
  const double secs = seconds_since(t0);
  ok = ok && secs <= 300.0;
  return {ok, "oracle head/direct/reflected " + fmt(oracle.head) + "/" + fmt(oracle.direct) + "/" +
                  fmt(oracle.reflected) + ", matched " + fmt(matched[0]) + "/" + fmt(matched[1]) + "/" +
                  fmt(matched[2]) + " (+-0.05); peaks" + found + "; " + std::to_string(res.tents) + " tents, " +
                  fmt(secs) + " s (<=300)"};
}

Outcome seed_check() {
  const auto rows = seed_study(2, 0.5, {2, 7, 8, 9, 10, 11}, StudyOptions{});
  auto get = [&](SeedKind s, int p) -> const SeedRow& {
    for (const auto& r : rows) {
      if (r.seed == s && r.p == p) return r;
    }
    throw Error(ErrorKind::InvalidArgument, "missing seed row");
  };
  std::string detail = "condition growth p=2..8:";
  const double gm = get(SeedKind::Monomial, 8).condition / get(SeedKind::Monomial, 2).condition;
  bool ok = true;
  for (SeedKind s : kAllSeedKinds) {
    const double g = get(s, 8).condition / get(s, 2).condition;
    if (s != SeedKind::Monomial) ok = ok && g > gm;
    detail += std::string(" ") + to_string(s) + " " + fmt(g);
  }
  // successive error ratios for p = 7..11: monomials keep dropping (< 0.5),
  // the other seeds stagnate or grow (> 0.5) at some step
  detail += "; error ratios p=8..11:";
  for (SeedKind s : kAllSeedKinds) {
    bool stalls = false, drops = true;
    detail += std::string(" ") + to_string(s);
    for (int p = 8; p <= 11; ++p) {
      const double r = get(s, p).error / get(s, p - 1).error;
      stalls = stalls || r > 0.5;
      drops = drops && r < 0.5;
      detail += " " + fmt(r, 2);
    }
    ok = ok && (s == SeedKind::Monomial ? drops : stalls);
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"AC1 Trefftz property", trefftz_property},
      {"AC2 dimensions", dimensions},
      {"AC3 exact reproduction", exact_reproduction},
      {"AC4 h-convergence", h_convergence_check},
      {"AC5 p-convergence", p_convergence_check},
      {"AC6 space comparison", space_comparison},
      {"AC7 solver equivalence", solver_equivalence},
      {"AC8 determinism and speedup", determinism_and_speedup},
      {"AC9 energy", energy_check},
      {"AC10 L-shape", lshape_check},
      {"AC11 heterogeneous media", hetero_check},
      {"AC12 seed study", seed_check},
  };
  int passed = 0, errors = 0;
  for (const auto& [name, fn] : checks) {
    try {
      const Outcome o = fn();
      passed += o.pass;
      std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    } catch (const std::exception& e) {
      ++errors;
      std::cout << "FAIL " << name << ": error: " << e.what() << std::endl;
    }
  }
  std::cout << passed << "/" << checks.size() << " criteria passed" << std::endl;
  if (errors > 0) return 2;
  return strict && passed != static_cast<int>(checks.size()) ? 1 : 0;
}

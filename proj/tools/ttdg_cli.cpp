#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ttdg/studies.hpp"

using namespace ttdg;
using json = nlohmann::json;

namespace {

struct Common {
  double T = 1.0;
  double gamma = 0.5;
  double alpha = 0.5;
  double beta = 0.5;
  std::string seed = "monomial";
  int workers = 1;
  std::string out;
  std::string recovery = "off";

  StudyOptions options() const {
    StudyOptions o;
    o.T = T;
    o.gamma = gamma;
    o.params.alpha = alpha;
    o.params.beta = beta;
    o.seed = parse_seed_kind(seed);
    o.workers = workers;
    if (recovery == "bottom" || recovery == "on") {
      o.params.recovery = true;
    } else if (recovery == "top") {
      o.params.recovery = true;
      o.params.recovery_face = RecoveryFace::Top;
    } else if (recovery != "off") {
      throw Error(ErrorKind::InvalidArgument, "recovery must be off, on, bottom or top");
    }
    o.params.check();
    return o;
  }
};

void add_common(CLI::App* app, Common& c, bool with_T = true) {
  if (with_T) app->add_option("--T", c.T, "final time")->capture_default_str();
  app->add_option("--gamma", c.gamma, "causality safety factor in (0, 1)")->capture_default_str();
  app->add_option("--alpha", c.alpha, "penalty on v at time-like facets")->capture_default_str();
  app->add_option("--beta", c.beta, "penalty on sigma.n at time-like facets")->capture_default_str();
  app->add_option("--seed-kind", c.seed, "monomial, legendre or chebyshev")->capture_default_str();
  app->add_option("--workers", c.workers, "tent worker threads")->capture_default_str();
  app->add_option("--out", c.out, "output CSV file (stdout when empty)");
  app->add_option("--recovery", c.recovery, "off, on/bottom or top")->capture_default_str();
}

template <class Rows>
void emit(const Common& c, const Rows& rows) {
  if (c.out.empty()) {
    write_csv(std::cout, rows);
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + c.out + " for writing");
  write_csv(f, rows);
  if (!f) throw Error(ErrorKind::Io, "failed writing " + c.out);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
  f << text;
}

int fail(const std::string& type, const std::string& message) {
  std::cout << json{{"error", message}, {"type", type}}.dump() << std::endl;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-time Trefftz DG solver for the acoustic wave equation"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  Common c;

  int n = 1;
  std::vector<int> ps;
  std::vector<double> hs;

  auto* basis = app.add_subcommand("basis-info", "dimensions, residuals and ranks of the Trefftz bases");
  basis->add_option("--n", n, "space dimension")->capture_default_str();
  basis->add_option("--p", ps, "degrees")->required();
  basis->add_option("--seed-kind", c.seed)->capture_default_str();

  auto* conv = app.add_subcommand("convergence", "standing-wave h-convergence on tent meshes");
  conv->add_option("--n", n)->capture_default_str();
  conv->add_option("--p", ps, "degrees")->required();
  conv->add_option("--h", hs, "mesh sizes")->required();
  add_common(conv, c);

  auto* pconv = app.add_subcommand("pconvergence", "standing-wave p-convergence at fixed h");
  pconv->add_option("--n", n)->capture_default_str();
  pconv->add_option("--p", ps, "degrees")->required();
  pconv->add_option("--h", hs, "mesh size")->required()->expected(1);
  add_common(pconv, c);

  auto* spaces = app.add_subcommand("compare-spaces", "Trefftz versus full polynomial spaces on Cartesian slabs");
  spaces->add_option("--p", ps, "degrees")->required();
  spaces->add_option("--h", hs, "mesh size")->required()->expected(1);
  add_common(spaces, c);

  auto* meshing = app.add_subcommand("compare-meshing", "tent solves versus block-Jacobi slabs");
  meshing->add_option("--p", ps, "degrees")->required();
  meshing->add_option("--h", hs, "mesh sizes")->required();
  add_common(meshing, c);

  auto* seeds = app.add_subcommand("seed-study", "error and conditioning for each seed basis");
  seeds->add_option("--n", n)->capture_default_str();
  seeds->add_option("--p", ps, "degrees")->required();
  seeds->add_option("--h", hs, "mesh size")->required()->expected(1);
  add_common(seeds, c);

  double every = 1.0;
  auto* energy = app.add_subcommand("energy", "energy of the homogeneous Dirichlet sine wave over time");
  energy->add_option("--p", ps, "degrees")->required();
  energy->add_option("--every", every, "spacing of the recorded flat fronts")->capture_default_str();
  add_common(energy, c);

  double mu = 1.0 / 3.0;
  int p_single = 3;
  auto* lshape = app.add_subcommand("lshape", "Bessel solution on the L-shape, uniform and graded meshes");
  lshape->add_option("--p", p_single)->capture_default_str();
  lshape->add_option("--h", hs, "maximal mesh sizes")->required();
  lshape->add_option("--mu", mu, "grading exponent; 1 gives uniform meshes")->capture_default_str();
  add_common(lshape, c);

  HeteroSetup hetero_setup;
  std::string snapshot_out;
  auto* hetero = app.add_subcommand("hetero", "Gaussian pulse in a two-material square");
  hetero->add_option("--p", hetero_setup.p)->capture_default_str();
  hetero->add_option("--h", hetero_setup.h)->capture_default_str();
  hetero->add_option("--dt", hetero_setup.dt_sample, "measurement sampling interval")->capture_default_str();
  hetero->add_option("--snapshot-times", hetero_setup.snapshot_times, "times of the U snapshots");
  hetero->add_option("--snapshot-grid", hetero_setup.snapshot_grid, "snapshot samples per axis")->capture_default_str();
  hetero->add_option("--snapshot-out", snapshot_out, "snapshot CSV file");
  add_common(hetero, c);

  auto* mesh = app.add_subcommand("mesh", "generate or validate meshes");
  mesh->require_subcommand(1);
  std::string kind = "square";
  std::string marker = "dirichlet";
  double h = 0.25;
  auto* gen = mesh->add_subcommand("generate", "write a generated mesh");
  gen->add_option("--kind", kind, "interval, square, lshape or hetero")->capture_default_str();
  gen->add_option("--h", h)->capture_default_str();
  gen->add_option("--mu", mu)->capture_default_str();
  gen->add_option("--marker", marker, "boundary marker")->capture_default_str();
  gen->add_option("--out", c.out);
  std::string mesh_file;
  auto* val = mesh->add_subcommand("validate", "check a mesh file and its tent pitching");
  val->add_option("file", mesh_file)->required();
  val->add_option("--T", c.T)->capture_default_str();
  val->add_option("--gamma", c.gamma)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (*basis) {
      const SeedKind s = parse_seed_kind(c.seed);
      json rows = json::array();
      for (int p : ps) {
        const auto r = basis_report(p, n, s);
        rows.push_back({{"p", r.p},
                        {"n", r.n},
                        {"seed", to_string(r.seed)},
                        {"scalar_dim", r.scalar_dim},
                        {"first_order_dim", r.first_order_dim},
                        {"scalar_rank", r.scalar_rank},
                        {"first_order_rank", r.first_order_rank},
                        {"scalar_residual", r.scalar_residual},
                        {"first_order_residual", r.first_order_residual}});
      }
      std::cout << rows.dump(2) << std::endl;
    } else if (*conv) {
      emit(c, h_convergence(n, ps, hs, c.options()));
    } else if (*pconv) {
      emit(c, p_convergence(n, hs.front(), ps, c.options()));
    } else if (*spaces) {
      emit(c, compare_spaces(hs.front(), ps, c.options()));
    } else if (*meshing) {
      emit(c, compare_meshing(hs, ps, c.options()));
    } else if (*seeds) {
      emit(c, seed_study(n, hs.front(), ps, c.options()));
    } else if (*energy) {
      emit(c, energy_study(ps, c.T, every, c.options()));
    } else if (*lshape) {
      std::vector<LShapeRow> rows;
      for (double hm : hs) rows.push_back(lshape_run(hm, mu, p_single, c.options()));
      fill_dof_rates(rows);
      emit(c, rows);
    } else if (*hetero) {
      hetero_setup.T = c.T;
      const auto res = hetero_run(hetero_setup, c.options());
      emit(c, res.series);
      if (!snapshot_out.empty()) {
        std::ofstream f(snapshot_out);
        if (!f) throw Error(ErrorKind::Io, "cannot open " + snapshot_out + " for writing");
        write_snapshot_csv(f, res.snapshots);
      }
    } else if (*gen) {
      const BoundaryMarker m = parse_marker(marker);
      SpatialMesh out = [&] {
        if (kind == "interval") return unit_mesh(1, h, m);
        if (kind == "square") return unit_mesh(2, h, m);
        if (kind == "lshape") return make_lshape_graded(h, mu);
        if (kind == "hetero") {
          HeteroSetup s;
          s.h = h;
          return hetero_mesh(s);
        }
        throw Error(ErrorKind::InvalidArgument, "unknown mesh kind '" + kind + "'");
      }();
      write_file(c.out, write_mesh(out));
    } else if (*val) {
      const auto m = read_mesh(read_file(mesh_file));
      std::map<int, double> unit;
      for (int k = 0; k < m.num_elements(); ++k) unit[m.material(k)] = 1.0;
      const WavespeedMap speeds(unit);
      const auto slab = pitch(m, speeds, c.T, c.gamma);
      const auto issues = validate(slab, m, speeds);
      json report{{"dim", m.dim()},
                  {"vertices", m.num_vertices()},
                  {"elements", m.num_elements()},
                  {"tents", slab.size()},
                  {"layers", slab.layers.size()},
                  {"violations", issues.size()}};
      std::cout << report.dump() << std::endl;
      if (!issues.empty()) return fail("slab_violation", issues.front().message);
    }
  } catch (const Error& e) {
    return fail(to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}

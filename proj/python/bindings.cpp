#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ttdg/studies.hpp"

namespace py = pybind11;
using namespace ttdg;

namespace {

StudyOptions options(double T, double gamma, double alpha, double beta, const std::string& seed, int workers) {
  StudyOptions o;
  o.T = T;
  o.gamma = gamma;
  o.params.alpha = alpha;
  o.params.beta = beta;
  o.params.check();
  o.seed = parse_seed_kind(seed);
  o.workers = workers;
  return o;
}

py::list rows_to_dicts(const std::vector<ConvergenceRow>& rows) {
  py::list out;
  for (const auto& r : rows) {
    py::dict d;
    d["h"] = r.h;
    d["p"] = r.p;
    d["dofs"] = r.dofs;
    d["error"] = r.error;
    d["rate"] = r.rate;
    d["seconds"] = r.seconds;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Space-time Trefftz DG solver for the acoustic wave equation";

  py::register_exception<Error>(m, "TtdgError", PyExc_RuntimeError);

  m.def("trefftz_dims", [](int p, int n) {
    return py::make_tuple(scalar_trefftz_dim(p, n), first_order_trefftz_dim(p, n));
  }, py::arg("p"), py::arg("n"), "Dimensions (scalar, first order) of the Trefftz spaces.");

  m.def("basis_report", [](int p, int n, const std::string& seed) {
    const auto r = basis_report(p, n, parse_seed_kind(seed));
    py::dict d;
    d["scalar_dim"] = r.scalar_dim;
    d["first_order_dim"] = r.first_order_dim;
    d["scalar_rank"] = r.scalar_rank;
    d["first_order_rank"] = r.first_order_rank;
    d["scalar_residual"] = r.scalar_residual;
    d["first_order_residual"] = r.first_order_residual;
    return d;
  }, py::arg("p"), py::arg("n"), py::arg("seed") = "monomial");

  m.def("h_convergence", [](int n, std::vector<int> ps, std::vector<double> hs, double T, double gamma, int workers) {
    return rows_to_dicts(h_convergence(n, ps, hs, options(T, gamma, 0.5, 0.5, "monomial", workers)));
  }, py::arg("n"), py::arg("ps"), py::arg("hs"), py::arg("T") = 1.0, py::arg("gamma") = 0.5, py::arg("workers") = 1);

  m.def("p_convergence", [](int n, double h, std::vector<int> ps, double T) {
    return rows_to_dicts(p_convergence(n, h, ps, options(T, 0.5, 0.5, 0.5, "monomial", 1)));
  }, py::arg("n"), py::arg("h"), py::arg("ps"), py::arg("T") = 1.0);

  m.def("energy_series", [](int p, double T, double every) {
    py::list out;
    for (const auto& r : energy_study({p}, T, every, options(T, 0.5, 0.5, 0.5, "monomial", 1))) {
      out.append(py::make_tuple(r.t, r.E, r.relerr));
    }
    return out;
  }, py::arg("p"), py::arg("T"), py::arg("every"), "(t, E, relative error) after every slab.");

  m.def("ray_arrivals", [](std::array<double, 2> s, std::array<double, 2> r, double xi, double c1, double c2) {
    const auto a = ray_arrivals(s, r, xi, c1, c2);
    return py::make_tuple(a.head, a.direct, a.reflected);
  }, py::arg("source"), py::arg("receiver"), py::arg("interface_x"), py::arg("c1"), py::arg("c2"));

  m.def("pitch_summary", [](int n, double h, double T, double gamma) {
    const auto mesh = unit_mesh(n, h);
    const auto speeds = WavespeedMap::uniform(1.0);
    const auto slab = pitch(mesh, speeds, T, gamma);
    py::dict d;
    d["tents"] = slab.size();
    d["layers"] = slab.layers.size();
    d["violations"] = validate(slab, mesh, speeds).size();
    return d;
  }, py::arg("n"), py::arg("h"), py::arg("T") = 1.0, py::arg("gamma") = 0.5);
}

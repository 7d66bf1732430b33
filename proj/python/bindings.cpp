#include "cli_app.hpp"
#include "saext/bipartite.hpp"
#include "saext/boundary_param.hpp"
#include "saext/quadform1d.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

namespace py = pybind11;


PYBIND11_MODULE(_saext, m) {
  m.doc() = "Python bindings of the saext library";

  static py::exception<saext::Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const saext::Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("code") = std::string(saext::to_string(e.code()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    } catch (const saext::cli::ValidationError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<saext::BoundaryUnitary>(m, "BoundaryUnitary")
      .def_static("from_matrix", &saext::BoundaryUnitary::from_matrix, py::arg("matrix"))
      .def_property_readonly("matrix", &saext::BoundaryUnitary::matrix)
      .def_property_readonly("dim", &saext::BoundaryUnitary::dim)
      .def_property_readonly("gap_delta", &saext::BoundaryUnitary::gap_delta)
      .def_property_readonly("no_gap", &saext::BoundaryUnitary::no_gap)
      .def_property_readonly("eigen_angles", &saext::BoundaryUnitary::eigen_angles)
      .def_property_readonly("cayley", &saext::BoundaryUnitary::cayley)
      .def("cayley_full", &saext::BoundaryUnitary::cayley_full)
      .def("w_projector", &saext::BoundaryUnitary::w_projector);

  m.def("inverse_cayley", &saext::inverse_cayley, py::arg("a"));
  m.def("dirichlet", [](int n) { return saext::named_condition(saext::Dirichlet{}, n); }, py::arg("n") = 2);
  m.def("neumann", [](int n) { return saext::named_condition(saext::Neumann{}, n); }, py::arg("n") = 2);
  m.def("robin", [](double c, int n) { return saext::named_condition(saext::Robin{c}, n); }, py::arg("c"),
        py::arg("n") = 2);
  m.def("quasi_periodic", [](double tau) { return saext::named_condition(saext::QuasiPeriodic{tau}, 2); },
        py::arg("tau"));

  m.def(
      "spectrum",
      [](double length, int n_elements, const saext::BoundaryUnitary& bu, int n_eigs,
         const std::vector<double>& potential) {
        const auto res = saext::solve(saext::assemble(length, n_elements, bu, potential), n_eigs);
        return res.eigenvalues;
      },
      py::arg("length"), py::arg("n_elements"), py::arg("boundary"), py::arg("n_eigs"),
      py::arg("potential") = std::vector<double>{},
      "Lowest FEM eigenvalues of -d^2/dx^2 + V on [0, length] with the given boundary unitary.");

  m.def(
      "bound_state",
      [](double lambda1, double lambda2, double alpha1) {
        const auto st = saext::bound_state(saext::BipartiteSystem::make(lambda1, lambda2), alpha1);
        py::dict d;
        d["energy"] = st.energy;
        d["alpha1"] = st.alpha1;
        d["alpha2"] = st.alpha2;
        d["kappa1"] = st.kappa1;
        d["kappa2"] = st.kappa2;
        d["schmidt"] = std::vector<double>{st.schmidt[0], st.schmidt[1]};
        d["entropy"] = st.entropy;
        return d;
      },
      py::arg("lambda1"), py::arg("lambda2"), py::arg("alpha1"));

  m.def(
      "compatibility_curve",
      [](double sigma, const std::vector<double>& alpha1) {
        const auto curve = saext::compatibility_curve(sigma, alpha1);
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : curve.points) pts.emplace_back(p.alpha1, p.alpha2);
        return pts;
      },
      py::arg("sigma"), py::arg("alpha1_samples"));

  m.def(
      "run_config",
      [](const std::string& config, std::uint64_t seed) {
        saext::cli::Overrides ov;
        ov.seed = seed;
        const auto art = saext::cli::execute(config, ov);
        return py::make_tuple(art.format, art.body);
      },
      py::arg("config"), py::arg("seed") = 0,
      "Runs a CLI config document and returns (format, body).");
}

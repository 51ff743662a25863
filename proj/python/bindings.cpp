#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "puncvol/bounds.hpp"
#include "puncvol/commands.hpp"
#include "puncvol/errors.hpp"
#include "puncvol/functionals.hpp"
#include "puncvol/matrixkit.hpp"
#include "puncvol/pfaffian.hpp"
#include "puncvol/topology.hpp"

namespace py = pybind11;
using namespace puncvol;

namespace {

matrixkit::SmallMatrix to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw DomainError("matrix must have at least one row");
  matrixkit::SmallMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw DomainError("ragged matrix");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

fields::VectorField field_from(const std::string& spec_json) {
  return fields::VectorField(fields::VectorFieldSpec::from_json(nlohmann::json::parse(spec_json)));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "puncvol native core; report-returning functions exchange JSON strings";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SingularityError>(m, "SingularityError", PyExc_ArithmeticError);
  py::register_exception<DegeneratePointError>(m, "DegeneratePointError", PyExc_ArithmeticError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);

  m.attr("__version__") = PUNCVOL_VERSION;

  m.def("sphere_volume", &sphere::sphere_volume, py::arg("m"));
  m.def(
      "elem_sym", [](const std::vector<std::vector<double>>& a, std::size_t k) { return matrixkit::elem_sym(to_matrix(a), k); },
      py::arg("a"), py::arg("k"));
  m.def(
      "graph_volume", [](const std::vector<std::vector<double>>& a) { return matrixkit::graph_volume(to_matrix(a)); },
      py::arg("a"));
  m.def(
      "volume_json",
      [](const std::string& field, const std::string& grid) {
        const auto f = field_from(field);
        const auto spec = grid.empty() ? functionals::default_volume_grid(f)
                                       : sphere::GridSpec::from_json(nlohmann::json::parse(grid));
        py::gil_scoped_release nogil;
        return functionals::volume(f, spec).to_json().dump();
      },
      py::arg("field"), py::arg("grid") = "");
  m.def(
      "field_index_json",
      [](const std::string& field, const std::vector<double>& point, double radius) {
        const auto f = field_from(field);
        const auto p = sphere::SpherePoint::normalized(point);
        py::gil_scoped_release nogil;
        return topology::field_index(f, p, radius, topology::default_degree_grid(2 * f.n())).to_json().dump();
      },
      py::arg("field"), py::arg("point"), py::arg("radius") = 0.1);
  m.def(
      "verify_lemma_json", [](int n) { return pfaffian::to_json(pfaffian::verify_lemma(n)).dump(); }, py::arg("n"));
  m.def(
      "bounds_json", [](int n, const std::vector<int>& indices) { return bounds::bound_report(n, indices).to_json().dump(); },
      py::arg("n"), py::arg("indices"));
  m.def(
      "chain_table_json",
      [](const std::vector<int>& ns) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : bounds::chain_table(ns)) rows.push_back(r.to_json());
        return rows.dump();
      },
      py::arg("ns"));
  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release nogil;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}

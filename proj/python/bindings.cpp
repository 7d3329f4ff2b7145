#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fosl/cli.hpp"
#include "fosl/harness.hpp"
#include "fosl/norms.hpp"
#include "fosl/summation.hpp"
#include "fosl/whitney.hpp"
#include "fosl/young.hpp"

namespace py = pybind11;
using namespace fosl;

namespace {

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> inside_centers(const Grid& g) {
  py::array_t<double> out({static_cast<py::ssize_t>(g.inside_count()), static_cast<py::ssize_t>(g.dim())});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t k = 0; k < g.inside_count(); ++k) {
    const Point c = g.inside_center(k);
    for (int a = 0; a < g.dim(); ++a) m(static_cast<py::ssize_t>(k), a) = c[static_cast<std::size_t>(a)];
  }
  return out;
}

Point as_point(const std::vector<double>& x) {
  if (x.empty() || x.size() > 2) throw std::invalid_argument("point must have 1 or 2 coordinates");
  return {x[0], x.size() > 1 ? x[1] : 0.0};
}

}  // namespace

PYBIND11_MODULE(_fosl, m) {
  m.doc() = "fractional Orlicz-Sobolev laboratory";
  m.attr("__version__") = kVersion;

  py::class_<YoungFunction>(m, "YoungFunction")
      .def_property_readonly("name", &YoungFunction::name)
      .def_property_readonly("params", &YoungFunction::params)
      .def("__call__", &YoungFunction::eval, py::arg("t"))
      .def("log_eval", &YoungFunction::log_eval, py::arg("t"))
      .def("closed_inverse", &YoungFunction::closed_inverse, py::arg("y"))
      .def("pure_power", &YoungFunction::pure_power)
      .def("__repr__", [](const YoungFunction& f) { return "<YoungFunction " + f.name() + ">"; });

  m.def("make_young", &make_young, py::arg("name"), py::arg("params") = Params{});
  m.def("young_family_names", &young_family_names);
  m.def("power_compose", &power_compose, py::arg("phi"), py::arg("q"));
  m.def("inverse", &inverse, py::arg("phi"), py::arg("y"));
  m.def(
      "estimate_C_beta",
      [](const YoungFunction& phi, double beta) {
        const auto e = estimate_C_beta(phi, beta);
        return py::dict(py::arg("status") = to_string(e.status), py::arg("value") = e.value,
                        py::arg("argmax_t") = e.argmax_t);
      },
      py::arg("phi"), py::arg("beta"));
  m.def(
      "estimate_doubling",
      [](const YoungFunction& phi) {
        const auto e = estimate_doubling(phi);
        return py::dict(py::arg("finite") = e.finite, py::arg("value") = e.value, py::arg("argmax_t") = e.argmax_t);
      },
      py::arg("phi"));
  m.def(
      "analyze_young", [](const YoungFunction& phi, double beta) { return to_py(to_json(analyze_young(phi, beta))); },
      py::arg("phi"), py::arg("beta"));

  py::class_<Domain>(m, "Domain")
      .def_property_readonly("name", &Domain::name)
      .def_property_readonly("dim", &Domain::dim)
      .def_property_readonly("params", &Domain::params)
      .def_property_readonly("diam", &Domain::diam)
      .def_property_readonly("ahlfors_regular", &Domain::ahlfors_regular)
      .def_property_readonly("bbox",
                             [](const Domain& d) {
                               const Box& b = d.bbox();
                               return py::make_tuple(py::make_tuple(b.lo[0], b.lo[1]), py::make_tuple(b.hi[0], b.hi[1]));
                             })
      .def("inside", [](const Domain& d, const std::vector<double>& x) { return d.inside(as_point(x)); })
      .def("sdist", [](const Domain& d, const std::vector<double>& x) { return d.sdist(as_point(x)); });

  m.def("make_domain", &make_domain, py::arg("name"), py::arg("params") = Params{});
  m.def("domain_names", &domain_names);

  py::class_<Grid, std::shared_ptr<Grid>>(m, "Grid")
      .def(py::init<const Domain&, int>(), py::arg("domain"), py::arg("resolution"))
      .def_property_readonly("dim", &Grid::dim)
      .def_property_readonly("h", &Grid::h)
      .def_property_readonly("cell_measure", &Grid::cell_measure)
      .def_property_readonly("inside_count", &Grid::inside_count)
      .def_property_readonly("domain", &Grid::domain)
      .def("centers", &inside_centers);

  py::class_<SampledFunction>(m, "SampledFunction")
      .def_readwrite("name", &SampledFunction::name)
      .def_property_readonly("values", [](const SampledFunction& u) { return to_array(u.values); })
      .def("__len__", &SampledFunction::size);

  m.def(
      "sample",
      [](std::shared_ptr<Grid> g, const std::function<double(double, double)>& f, std::string name) {
        return sample(g, [&](const Point& x) { return f(x[0], x[1]); }, std::move(name));
      },
      py::arg("grid"), py::arg("f"), py::arg("name") = "u");
  m.def(
      "from_values",
      [](std::shared_ptr<Grid> g, const std::vector<double>& values, std::string name) {
        if (values.size() != g->inside_count()) throw std::invalid_argument("one value per inside cell expected");
        return SampledFunction{g, values, std::move(name)};
      },
      py::arg("grid"), py::arg("values"), py::arg("name") = "u");

  m.def(
      "seminorm",
      [](const SampledFunction& u, const YoungFunction& phi, double beta) {
        py::gil_scoped_release nogil;
        return luxemburg_seminorm(u, phi, beta);
      },
      py::arg("u"), py::arg("phi"), py::arg("beta"));
  m.def("seminorm_modular", &seminorm_modular, py::arg("u"), py::arg("phi"), py::arg("beta"), py::arg("lam"));
  m.def("orlicz_norm", py::overload_cast<const SampledFunction&, const YoungFunction&>(&orlicz_norm), py::arg("u"),
        py::arg("psi"));
  m.def(
      "inf_centered_norm",
      [](const SampledFunction& u, const YoungFunction& psi) {
        const auto r = inf_centered_norm(u, psi);
        return py::make_tuple(r.norm, r.c);
      },
      py::arg("u"), py::arg("psi"));
  m.def("set_thread_count", &set_thread_count, py::arg("n"));

  m.def(
      "whitney",
      [](std::shared_ptr<Grid> g) {
        const auto d = whitney_decompose(*g);
        return to_py(to_json(d, validate(d)));
      },
      py::arg("grid"));
  m.def("cutoff_rho", &cutoff_rho, py::arg("s"));

  py::class_<ExtensionOperator>(m, "ExtensionOperator")
      .def(py::init([](std::shared_ptr<Grid> g, double theta) { return std::make_unique<ExtensionOperator>(g, theta); }),
           py::arg("grid"), py::arg("theta"))
      .def_property_readonly("box_grid", [](const ExtensionOperator& e) { return std::const_pointer_cast<Grid>(e.box_grid()); })
      .def_property_readonly("covered_cells", &ExtensionOperator::covered_cells)
      .def_property_readonly("uncovered_cells", &ExtensionOperator::uncovered_cells)
      .def("extend", &ExtensionOperator::extend, py::arg("u"))
      .def("measure_L", [](const ExtensionOperator& e) { return e.partition().measure_L(); });

  m.def("check_names", &check_names);
  m.def(
      "run_check",
      [](const std::string& id, const std::string& config_text) {
        const auto c = parse_config(config_text);
        InequalityReport r;
        {
          py::gil_scoped_release nogil;
          r = run_check(id, c);
        }
        return to_py(to_json(r, false));
      },
      py::arg("id"), py::arg("config_text"));
}

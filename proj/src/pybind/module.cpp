#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "achlab/experiments.hpp"

namespace py = pybind11;
using namespace ach;

PYBIND11_MODULE(_achlab, m) {
    m.doc() = "multiphase transition energy laboratory on periodic tori";
    m.attr("__version__") = artifact_version();

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    static py::exception<Error> base_exc(m, "AchError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError&) {
            throw;  // handled above
        } catch (const ShapeError&) {
            throw;
        } catch (const Error& e) {
            base_exc(e.what());
        }
    });

    py::class_<TorusGrid>(m, "TorusGrid")
        .def_static("line", &TorusGrid::line, py::arg("cells"),
                    py::arg("length") = 1.0)
        .def_static("square", &TorusGrid::square, py::arg("cells_x"),
                    py::arg("cells_y"), py::arg("Lx") = 1.0, py::arg("Ly") = 1.0)
        .def_readonly("n", &TorusGrid::n)
        .def("cells", &TorusGrid::cells)
        .def("h", &TorusGrid::h);

    py::class_<ConformalMetric>(m, "ConformalMetric")
        .def_static("flat", &ConformalMetric::flat)
        .def_readonly("vol_b", &ConformalMetric::vol_b);
    m.def("metric", &metric_from_expr, py::arg("grid"), py::arg("rho") = "1");

    py::class_<Field>(m, "Field")
        .def(py::init<const TorusGrid&, int, double>(), py::arg("grid"),
             py::arg("components") = 1, py::arg("fill") = 0.0)
        .def_readonly("grid", &Field::grid)
        .def_readonly("m", &Field::m)
        .def_readwrite("values", &Field::v)
        .def("at", py::overload_cast<int, long>(&Field::at, py::const_));

    py::class_<Potential>(m, "Potential")
        .def("value", &Potential::value)
        .def_property_readonly("m", &Potential::m)
        .def_property_readonly("N", &Potential::N)
        .def("minimum", &Potential::minimum);
    m.def("double_well", &build_double_well);
    m.def("triple_well", [](const Vec& p1, const Vec& p2) {
        return build_product_triple_well(p1, p2);
    });

    py::class_<TensionMatrix>(m, "TensionMatrix")
        .def_readonly("N", &TensionMatrix::N)
        .def_readonly("omega", &TensionMatrix::omega)
        .def_readonly("immiscible", &TensionMatrix::immiscible)
        .def_readonly("worst_margin", &TensionMatrix::worst_margin)
        .def("at", &TensionMatrix::at);
    m.def(
        "tension_matrix",
        [](const Potential& P, int K) { return tension_matrix(P, K); },
        py::arg("potential"), py::arg("nodes") = 64);

    m.def("energy", &energy);
    m.def("volume", &volume);
    m.def("project_volume", &project_volume);

    py::class_<CriticalPoint>(m, "CriticalPoint")
        .def_readonly("u", &CriticalPoint::u)
        .def_readonly("energy", &CriticalPoint::energy)
        .def_readonly("lambda_", &CriticalPoint::lambda)
        .def_readonly("residual_norm", &CriticalPoint::residual_norm)
        .def_readonly("volume", &CriticalPoint::volume)
        .def_readonly("converged", &CriticalPoint::converged)
        .def_readonly("iterations", &CriticalPoint::iterations);
    m.def(
        "constrained_flow",
        [](const Field& u0, double eps, const Vec& v, const Potential& P,
           const ConformalMetric& g, double tol) {
            FlowOptions fo;
            fo.tol = tol;
            fo.throw_on_fail = false;
            return constrained_flow(u0, eps, v, P, g, fo);
        },
        py::arg("u0"), py::arg("eps"), py::arg("volume"), py::arg("potential"),
        py::arg("metric"), py::arg("tol") = 1e-8);
    m.def("degeneracy_scan", &degeneracy_scan);

    py::class_<Cluster>(m, "Cluster")
        .def_readonly("N", &Cluster::N)
        .def_readonly("labels", &Cluster::labels);
    m.def("digital_disk", &digital_disk);
    m.def("digital_interval", &digital_interval);
    m.def("volumes", &volumes);
    m.def("multi_perimeter", &multi_perimeter);
    m.def("isotropic_perimeter", &isotropic_perimeter);
    m.def("from_field", &from_field);
    m.def(
        "mbo_minimize",
        [](const Vec& v, const TensionMatrix& T, const ConformalMetric& g) {
            MboResult r = mbo_minimize(v, T, g);
            return py::make_tuple(r.cluster, r.converged, r.sweeps);
        },
        py::arg("volumes"), py::arg("tensions"), py::arg("metric"));
    m.def("unit_tensions", &unit_tensions);

    m.def(
        "modica_baldo",
        [](const Cluster& c, const Potential& P, const TensionMatrix& T,
           double eps, double tau, const ConformalMetric& g, const Vec& v) {
            return modica_baldo(c, P, T, eps, tau, g, v).u;
        },
        py::arg("cluster"), py::arg("potential"), py::arg("tensions"),
        py::arg("eps"), py::arg("tau"), py::arg("metric"), py::arg("volume"));
    m.def("cluster_phase_volume", &cluster_phase_volume);

    py::class_<TorusPoint>(m, "TorusPoint").def_readonly("x", &TorusPoint::x);
    m.def("torus_point", [](const TorusGrid& g, const std::vector<double>& x) {
        return TorusPoint::reduced(g, x);
    });
    m.def("photo", &photo, py::arg("x"), py::arg("volume"), py::arg("eps"),
          py::arg("potential"), py::arg("tensions"), py::arg("metric"),
          py::arg("shape_rule") = "auto", py::arg("profile_K") = 256);
    m.def("barycenter", [](const Field& u, const ConformalMetric& g) {
        BarycenterResult b = barycenter(u, g);
        return py::make_tuple(b.embedded, b.defined,
                              b.defined ? py::cast(b.projected.x)
                                        : py::none().cast<py::object>());
    });

    m.def("run_config", [](const std::string& text) {
        ReportBundle rep = run(parse_config(text));
        return py::make_tuple(rep.passed, rep.csv, rep.json);
    });
}

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ddm/assembly.hpp"
#include "ddm/error_norms.hpp"
#include "ddm/experiment.hpp"
#include "ddm/geometry.hpp"
#include "ddm/oracle.hpp"
#include "ddm/problem.hpp"
#include "ddm/time_integration.hpp"

namespace py = pybind11;
using namespace ddm;

PYBIND11_MODULE(_ddmlab, m) {
    m.doc() = "diffuse domain solver laboratory (C++ core)";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<SolverError>(m, "SolverError");
    py::register_exception<NumericalError>(m, "NumericalError");
    py::register_exception<IoError>(m, "IoError");

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<double, double>())
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y)
        .def("__repr__", [](Vec2 v) {
            return "Vec2(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ")";
        });

    py::enum_<BandLabel>(m, "BandLabel")
        .value("deep_interior", BandLabel::deep_interior)
        .value("band", BandLabel::band)
        .value("deep_exterior", BandLabel::deep_exterior);

    py::class_<ClosestPoint>(m, "ClosestPoint")
        .def_readonly("point", &ClosestPoint::point)
        .def_readonly("normal", &ClosestPoint::normal)
        .def_readonly("medial_tie", &ClosestPoint::medial_tie);

    py::class_<ImplicitDomain>(m, "ImplicitDomain")
        .def_static("circle",
                    [](double cx, double cy, double r) {
                        return ImplicitDomain::circle({cx, cy}, r);
                    },
                    py::arg("cx"), py::arg("cy"), py::arg("radius"))
        .def_static("flower", &ImplicitDomain::flower, py::arg("r0"), py::arg("amplitude"),
                    py::arg("frequency"), py::arg("boundary_vertices") = 4096)
        .def("signed_distance",
             [](const ImplicitDomain& d, double x, double y) {
                 return d.signed_distance({x, y});
             })
        .def("closest_point",
             [](const ImplicitDomain& d, double x, double y) { return d.closest_point({x, y}); })
        .def("inscribed_radius", &ImplicitDomain::inscribed_radius)
        .def("min_curvature_radius", &ImplicitDomain::min_curvature_radius);

    py::class_<PhaseField>(m, "PhaseField")
        .def(py::init<const ImplicitDomain&, double, double>(), py::arg("domain"),
             py::arg("epsilon"), py::arg("floor_delta") = 0.0, py::keep_alive<1, 2>())
        .def("weight", [](const PhaseField& pf, double x, double y) { return pf.weight({x, y}); })
        .def("weight_from_distance", &PhaseField::weight_from_distance)
        .def("gradient_magnitude",
             [](const PhaseField& pf, double x, double y) {
                 return pf.weight_gradient({x, y}).magnitude;
             })
        .def("classify", [](const PhaseField& pf, double x, double y) {
            return pf.classify({x, y});
        })
        .def_property_readonly("epsilon", &PhaseField::epsilon);

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("epsilon", &SweepRow::epsilon)
        .def_readonly("l2_error", &SweepRow::l2_error)
        .def_readonly("l2_rate", &SweepRow::l2_rate)
        .def_readonly("h1_error", &SweepRow::h1_error)
        .def_readonly("h1_rate", &SweepRow::h1_rate)
        .def_readonly("runtime_seconds", &SweepRow::runtime_seconds);

    py::class_<SweepResult>(m, "SweepResult").def_readonly("rows", &SweepResult::rows);

    py::class_<ErrorReport>(m, "ErrorReport")
        .def_readonly("epsilon", &ErrorReport::epsilon)
        .def_readonly("l2_error", &ErrorReport::l2_error)
        .def_readonly("h1_error", &ErrorReport::h1_error)
        .def_readonly("wall_seconds", &ErrorReport::wall_seconds);

    py::class_<McEstimate>(m, "McEstimate")
        .def_readonly("value", &McEstimate::value)
        .def_readonly("std_error", &McEstimate::std_error)
        .def_readonly("samples", &McEstimate::samples)
        .def_readonly("seed", &McEstimate::seed);

    py::class_<ExperimentConfig>(m, "ExperimentConfig");

    m.def("parse_config_file", &parse_config_file, py::arg("path"));
    m.def("parse_config_text", &parse_config_text, py::arg("text"),
          py::arg("origin") = std::string("<text>"));
    m.def("validate_config", &validate_config);
    m.def(
        "run_single_errors",
        [](const ExperimentConfig& cfg, double epsilon) {
            const auto out = run_single(cfg, epsilon);
            return out.report;
        },
        py::arg("config"), py::arg("epsilon"),
        "Run one epsilon and return the weighted error report at t = T.");
    m.def("run_sweep", &run_sweep, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("convergence_rates", [](const std::vector<double>& errors) {
        return convergence_rates(errors);
    });
    m.def(
        "mc_weighted_integral",
        [](const std::function<double(double, double)>& f, double x0, double x1, double y0,
           double y1, const PhaseField* pf, long long samples, std::uint64_t seed, int workers) {
            return mc_weighted_integral([&](Vec2 p) { return f(p.x, p.y); },
                                        Rect{x0, x1, y0, y1}, pf, samples, seed, workers);
        },
        py::arg("integrand"), py::arg("x0"), py::arg("x1"), py::arg("y0"), py::arg("y1"),
        py::arg("phase_field") = nullptr, py::arg("samples") = 1000000,
        py::arg("seed") = 20240815, py::arg("workers") = 1);
}

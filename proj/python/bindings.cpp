#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "smelab/analysis.hpp"
#include "smelab/config.hpp"
#include "smelab/continuation.hpp"
#include "smelab/corpus.hpp"
#include "smelab/errors.hpp"
#include "smelab/io.hpp"
#include "smelab/operators.hpp"
#include "smelab/radial.hpp"
#include "smelab/solver.hpp"

namespace py = pybind11;
using namespace sme;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> a(v.size());
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

py::array_t<double> field_values(const ScalarField& u) {
    const auto vals = u.values();
    return to_array(std::vector<double>(vals.begin(), vals.end()));
}

py::dict profile_dict(const RadialProfile& p) {
    py::dict d;
    d["r"] = to_array(p.r);
    d["u"] = to_array(p.u);
    d["du_dr"] = to_array(p.s);
    d["kind"] = p.kind;
    d["stop_x"] = p.stop_x;
    d["hit_slope_cap"] = p.hit_slope_cap;
    d["error_estimate"] = p.error_estimate;
    return d;
}

RadialProfile profile_from(const Params& p, py::array_t<double> r, py::array_t<double> u, py::array_t<double> s) {
    if (r.size() != u.size() || r.size() != s.size()) throw PreconditionError("profile arrays differ in length");
    RadialProfile prof;
    prof.params = p;
    for (py::ssize_t i = 0; i < r.size(); ++i) prof.push(r.at(i), u.at(i), s.at(i));
    return prof;
}

py::dict outcome_dict(const SolveOutcome& o) {
    py::dict d;
    d["u"] = o.u;
    d["converged"] = o.converged;
    d["iterations"] = o.iterations;
    d["newton_iterations"] = o.newton_iterations;
    d["residual"] = o.residual;
    d["residual_kind"] = o.residual_kind;
    d["min_u"] = o.min_u;
    d["max_grad"] = o.max_grad;
    d["floor_active"] = o.floor_active;
    d["history"] = o.history;
    return d;
}

}  // namespace

PYBIND11_MODULE(_smelab, m) {
    m.doc() = "Numerical lab for the symmetric minimal surface equation";

    // Translators are tried newest first, so the base class goes first.
    py::register_exception<Error>(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
    py::register_exception<StructuralError>(m, "StructuralError", PyExc_RuntimeError);

    py::class_<Params>(m, "Params")
        .def(py::init<int, int>(), py::arg("m") = 2, py::arg("n") = 2)
        .def_readonly("m", &Params::m)
        .def_readonly("n", &Params::n)
        .def_property_readonly("cone_slope", &Params::cone_slope)
        .def_property_readonly("sigma_m1", &Params::sigma_m1)
        .def("__repr__", [](const Params& p) {
            return "Params(m=" + std::to_string(p.m) + ", n=" + std::to_string(p.n) + ")";
        });

    py::class_<Grid2D, std::shared_ptr<Grid2D>>(m, "Grid")
        .def(py::init([](const std::string& domain, double h) {
                 return std::make_shared<Grid2D>(Domain::parse(domain), h);
             }),
             py::arg("domain"), py::arg("h"))
        .def_property_readonly("h", &Grid2D::h)
        .def_property_readonly("size", &Grid2D::size)
        .def_property_readonly("interior", [](const Grid2D& g) { return g.interior(); })
        .def_property_readonly("boundary", [](const Grid2D& g) { return g.boundary(); })
        .def("coords",
             [](const Grid2D& g) {
                 py::array_t<double> a({py::ssize_t(g.size()), py::ssize_t(2)});
                 auto w = a.mutable_unchecked<2>();
                 for (std::size_t k = 0; k < g.size(); ++k) {
                     const Point p = g.coords(k);
                     w(k, 0) = p.x;
                     w(k, 1) = p.y;
                 }
                 return a;
             })
        .def("active_mask",
             [](const Grid2D& g) {
                 py::array_t<bool> a(g.size());
                 for (std::size_t k = 0; k < g.size(); ++k) a.mutable_at(k) = g.active(k);
                 return a;
             })
        .def("describe", &Grid2D::describe);

    py::class_<ScalarField>(m, "Field")
        .def(py::init([](std::shared_ptr<Grid2D> g, py::array_t<double> v) {
                 if (std::size_t(v.size()) != g->size()) throw PreconditionError("Field: one value per lattice node");
                 return ScalarField(g, std::vector<double>(v.data(), v.data() + v.size()));
             }),
             py::arg("grid"), py::arg("values"))
        .def_static("from_function",
                    [](std::shared_ptr<Grid2D> g, const std::function<double(double, double)>& f) {
                        return ScalarField::from_function(g, f);
                    })
        .def_property_readonly("values", &field_values)
        .def_property_readonly("grid", [](const ScalarField& u) { return std::const_pointer_cast<Grid2D>(u.grid()); })
        .def("min_interior", &ScalarField::min_interior)
        .def("max_interior", &ScalarField::max_interior)
        .def("argmin_point", [](const ScalarField& u) {
            const Point p = u.g().coords(u.argmin_interior());
            return py::make_tuple(p.x, p.y);
        });

    py::class_<BoundaryData>(m, "BoundaryData")
        .def_static("constant", [](std::shared_ptr<Grid2D> g, double c) { return BoundaryData::constant(g, c); })
        .def_static("from_spec",
                    [](const std::string& spec, std::shared_ptr<Grid2D> g, const Params& p) {
                        return boundary_from_spec(spec, g, p);
                    },
                    py::arg("spec"), py::arg("grid"), py::arg("params"))
        .def_property_readonly("values", [](const BoundaryData& b) { return to_array(b.values()); })
        .def("min", &BoundaryData::min)
        .def("max", &BoundaryData::max)
        .def_property_readonly("label", &BoundaryData::label);

    py::class_<SolveConfig>(m, "SolveConfig")
        .def(py::init<>())
        .def_readwrite("delta", &SolveConfig::delta)
        .def_readwrite("tol_residual", &SolveConfig::tol_residual)
        .def_readwrite("max_outer_iters", &SolveConfig::max_outer_iters)
        .def_readwrite("damping", &SolveConfig::damping)
        .def_readwrite("linear_tol", &SolveConfig::linear_tol)
        .def_readwrite("linear_max_iters", &SolveConfig::linear_max_iters)
        .def_readwrite("newton_polish", &SolveConfig::newton_polish)
        .def_readwrite("handoff_residual", &SolveConfig::handoff_residual)
        .def_readwrite("newton_max_iters", &SolveConfig::newton_max_iters)
        .def_readwrite("floor_stall_iters", &SolveConfig::floor_stall_iters);

    py::class_<ContinuationSchedule>(m, "ContinuationSchedule")
        .def(py::init<>())
        .def_readwrite("samples", &ContinuationSchedule::samples)
        .def_readwrite("max_bisections", &ContinuationSchedule::max_bisections)
        .def_readwrite("bracket_tol", &ContinuationSchedule::bracket_tol)
        .def_readwrite("delta_levels", &ContinuationSchedule::delta_levels)
        .def_readwrite("delta_fraction", &ContinuationSchedule::delta_fraction)
        .def_readwrite("collar_eta", &ContinuationSchedule::collar_eta)
        .def_readwrite("singular_threshold", &ContinuationSchedule::singular_threshold)
        .def_readwrite("floor_stall_iters", &ContinuationSchedule::floor_stall_iters)
        .def_readwrite("extract_singular", &ContinuationSchedule::extract_singular);

    // operators
    m.def("gradient", [](const ScalarField& u) {
        const VectorField g = gradient(u);
        return py::make_tuple(to_array(g.x), to_array(g.y));
    });
    m.def("mean_curvature_operator", &mean_curvature_operator);
    m.def("sme_residual", &sme_residual);
    m.def("area_functional", &area_functional);
    m.def("area_gradient", &area_gradient);
    m.def("weak_form_residual", &weak_form_residual);

    // radial
    m.def("integrate_n1",
          [](const Params& p, double x_max, double step) { return profile_dict(integrate_n1(p, x_max, step)); },
          py::arg("params"), py::arg("x_max"), py::arg("step") = 1e-3);
    m.def("integrate_exterior",
          [](const Params& p, double r_max, double step) {
              StepControl ctl;
              ctl.step = step;
              return profile_dict(integrate_exterior(p, r_max, ctl));
          },
          py::arg("params"), py::arg("r_max"), py::arg("step") = 1e-3);
    m.def("slope_sup",
          [](const Params& p, py::array_t<double> r, py::array_t<double> u, py::array_t<double> s) {
              const SlopeSup sup = slope_sup(profile_from(p, r, u, s));
              return py::make_tuple(sup.beta, sup.r_at, sup.at_last_sample);
          });
    m.def("radial_residual", [](const Params& p, py::array_t<double> r, py::array_t<double> u, py::array_t<double> s) {
        return to_array(radial_residual(profile_from(p, r, u, s)));
    });

    // solver
    m.def("solve_dirichlet",
          [](const BoundaryData& b, const Params& p, const SolveConfig& cfg) {
              py::gil_scoped_release release;
              SolveOutcome o = solve_dirichlet(b, p, cfg);
              py::gil_scoped_acquire acquire;
              return outcome_dict(o);
          },
          py::arg("boundary"), py::arg("params"), py::arg("config") = SolveConfig{});

    // continuation
    m.def("continuation_run",
          [](const BoundaryData& phi1, const Params& p, const SolveConfig& cfg, const ContinuationSchedule& sc,
             const std::string& family) {
              const BoundaryFamily fam =
                  family == "constant" ? BoundaryFamily::constant(phi1) : BoundaryFamily::linear(phi1);
              std::string json;
              {
                  py::gil_scoped_release release;
                  json = to_json(continuation_run(fam, p, cfg, sc));
              }
              return py::module_::import("json").attr("loads")(json);
          },
          py::arg("phi1"), py::arg("params"), py::arg("config") = SolveConfig{},
          py::arg("schedule") = ContinuationSchedule{}, py::arg("family") = "linear");

    // analysis
    m.def("holder_half_quotient",
          [](const ScalarField& u) { return holder_half_quotient(u, {}, 0.0); });
    m.def("weak_solution_check",
          [](const ScalarField& u, const Params& p, int trials, std::uint64_t seed, double threshold) {
              const WeakCheck w = weak_solution_check(u, p, trials, seed, threshold);
              py::dict d;
              d["max_relative"] = w.max_relative;
              d["max_relative_cutoff"] = w.max_relative_cutoff;
              d["cutoff_widths"] = w.cutoff_widths;
              d["cutoff_residuals"] = w.cutoff_residuals;
              d["cutoff_gradient_mass"] = w.cutoff_gradient_mass;
              return d;
          },
          py::arg("u"), py::arg("params"), py::arg("trials") = 10, py::arg("seed") = 12345,
          py::arg("threshold") = 0.0);
    m.def("blowup_slopes",
          [](const ScalarField& u, double x, double y, const std::vector<double>& scales) {
              const BlowupSequence b = blowup_sequence(u, {x, y}, scales);
              return py::make_tuple(b.slope_ratio, b.successive_diff);
          });
    m.def("singular_set", [](const ScalarField& u, double threshold) {
        const SingularSet s = singular_set(u, threshold);
        py::dict d;
        d["nodes"] = s.nodes;
        d["box_sizes"] = s.box_sizes;
        d["box_counts"] = s.box_counts;
        d["dimension"] = s.dimension ? py::object(py::float_(*s.dimension)) : py::object(py::none());
        return d;
    });
    m.def("verify_corpus",
          [](double h_coarse, double h_fine, int trials, std::uint64_t seed) {
              std::string json;
              {
                  py::gil_scoped_release release;
                  const SolveConfig cfg;
                  VerifyOptions opt;
                  opt.trials = trials;
                  opt.seed = seed;
                  json = to_json(verify_corpus(build_corpus(h_coarse, cfg), build_corpus(h_fine, cfg), opt));
              }
              return py::module_::import("json").attr("loads")(json);
          },
          py::arg("h_coarse") = 1.0 / 32, py::arg("h_fine") = 1.0 / 64, py::arg("trials") = 10,
          py::arg("seed") = 12345);

    m.def("write_field_csv", [](const ScalarField& u, const std::string& path) { write_field_csv(path, u); });
    m.def("read_field_csv", [](const std::string& path, std::shared_ptr<Grid2D> g) { return read_field_csv(path, g); });
}

#include "eplateau/asymptotic.hpp"
#include "eplateau/diffgeo.hpp"
#include "eplateau/energy.hpp"
#include "eplateau/fit.hpp"
#include "eplateau/mesh.hpp"
#include "eplateau/mesh_io.hpp"
#include "eplateau/optimizer.hpp"
#include "eplateau/stability.hpp"
#include "eplateau/sweep.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace eplateau;

namespace {

// Python sees positions as (n, 3) arrays; the library stores one column per vertex.
using Rows = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

Configuration to_config(const Eigen::Ref<const Rows>& rows) { return rows.transpose(); }

Rows to_rows(const Configuration& x) { return x.transpose(); }

void check_size(const TriMesh& mesh, const Eigen::Ref<const Rows>& rows) {
    if (rows.rows() != mesh.vertex_count()) {
        throw std::invalid_argument("positions must have one row per mesh vertex");
    }
}

py::dict breakdown(const EnergyBreakdown& e) {
    py::dict d;
    d["bending"] = e.bending;
    d["springs"] = e.springs;
    d["length_penalty"] = e.length_penalty;
    d["total"] = e.total;
    d["boundary_length"] = e.boundary_length;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Soap film spanning an inextensible elastic loop: discrete model and analysis";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DegenerateGeometry>(m, "DegenerateGeometry", m.attr("Error").ptr());
    py::register_exception<NumericalFailure>(m, "NumericalFailure", m.attr("Error").ptr());

    // Mesh ------------------------------------------------------------------

    py::class_<TriMesh>(m, "TriMesh")
        .def_static("from_triangles", &TriMesh::from_triangles, py::arg("vertex_count"), py::arg("triangles"))
        .def_property_readonly("vertex_count", &TriMesh::vertex_count)
        .def_property_readonly("triangles", &TriMesh::triangles)
        .def_property_readonly("boundary_loop", &TriMesh::boundary_loop)
        .def_property_readonly("interior_edges", &TriMesh::interior_edges)
        .def_property_readonly("boundary_edges", &TriMesh::boundary_edges)
        .def_property_readonly("edge_count", &TriMesh::edge_count);

    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("vertex_count", &ValidationReport::vertex_count)
        .def_readonly("edge_count", &ValidationReport::edge_count)
        .def_readonly("face_count", &ValidationReport::face_count)
        .def_readonly("euler_characteristic", &ValidationReport::euler_characteristic)
        .def_readonly("nonmanifold_edges", &ValidationReport::nonmanifold_edges)
        .def_readonly("orientation_inconsistencies", &ValidationReport::orientation_inconsistencies)
        .def_readonly("boundary_cycle_count", &ValidationReport::boundary_cycle_count)
        .def_property_readonly("passed", &ValidationReport::passed);

    py::class_<DiskMesh>(m, "DiskMesh")
        .def_readonly("mesh", &DiskMesh::mesh)
        .def_property_readonly("positions", [](const DiskMesh& d) { return to_rows(d.positions); });

    m.def("generate_disk_mesh", &generate_disk_mesh, py::arg("rings"), py::arg("elongation") = 1.0);
    m.def("generate_elongated_lattice_mesh", &generate_elongated_lattice_mesh, py::arg("rings"),
          py::arg("elongation"));
    m.def("generate_hexagon_mesh", &generate_hexagon_mesh, py::arg("long_side"), py::arg("short_side"));
    m.def("validate_mesh", &validate_mesh, py::arg("mesh"));
    m.def(
        "boundary_length",
        [](const TriMesh& mesh, const Eigen::Ref<const Rows>& x) {
            check_size(mesh, x);
            return boundary_length(mesh, to_config(x));
        },
        py::arg("mesh"), py::arg("positions"));
    m.def(
        "scale_to_boundary_length",
        [](const TriMesh& mesh, const Eigen::Ref<const Rows>& x, double length) {
            check_size(mesh, x);
            return to_rows(scale_to_boundary_length(mesh, to_config(x), length));
        },
        py::arg("mesh"), py::arg("positions"), py::arg("length"));
    m.def(
        "write_obj",
        [](const std::filesystem::path& path, const TriMesh& mesh, const Eigen::Ref<const Rows>& x) {
            check_size(mesh, x);
            write_obj(path, mesh, to_config(x));
        },
        py::arg("path"), py::arg("mesh"), py::arg("positions"));
    m.def("read_obj", py::overload_cast<const std::filesystem::path&>(&read_obj), py::arg("path"));

    // Energy ----------------------------------------------------------------

    py::enum_<LengthPenalty>(m, "LengthPenalty")
        .value("total", LengthPenalty::total)
        .value("per_edge", LengthPenalty::per_edge);

    py::class_<EnergyParams>(m, "EnergyParams")
        .def(py::init([](double alpha, double spring_k, double target_length, double length_penalty_k,
                         LengthPenalty kind) {
                 EnergyParams p{alpha, spring_k, target_length, length_penalty_k, kind};
                 p.validate();
                 return p;
             }),
             py::arg("alpha") = 1.0, py::arg("spring_k") = 0.0, py::arg("target_length") = 1.0,
             py::arg("length_penalty_k") = 0.0, py::arg("penalty_kind") = LengthPenalty::per_edge)
        .def_readwrite("alpha", &EnergyParams::alpha)
        .def_readwrite("spring_k", &EnergyParams::spring_k)
        .def_readwrite("target_length", &EnergyParams::target_length)
        .def_readwrite("length_penalty_k", &EnergyParams::length_penalty_k)
        .def_readwrite("penalty_kind", &EnergyParams::penalty_kind);

    m.def(
        "energy",
        [](const TriMesh& mesh, const Eigen::Ref<const Rows>& x, const EnergyParams& p) {
            check_size(mesh, x);
            return breakdown(energy(mesh, to_config(x), p));
        },
        py::arg("mesh"), py::arg("positions"), py::arg("params"));
    m.def(
        "gradient",
        [](const TriMesh& mesh, const Eigen::Ref<const Rows>& x, const EnergyParams& p) {
            check_size(mesh, x);
            return to_rows(gradient(mesh, to_config(x), p));
        },
        py::arg("mesh"), py::arg("positions"), py::arg("params"));
    m.def("sigma_from_spring_k", &sigma_from_spring_k, py::arg("spring_k"));
    m.def("spring_k_from_sigma", &spring_k_from_sigma, py::arg("sigma"));
    m.def(
        "gamma_numeric",
        [](double spring_k, double length, double alpha) {
            const DimensionlessGroups g = gamma_numeric(spring_k, length, alpha);
            return py::make_tuple(g.k_l3_over_alpha, g.gamma);
        },
        py::arg("spring_k"), py::arg("length") = 1.0, py::arg("alpha") = 1.0,
        "Returns (kL^3/alpha, gamma).");

    // Optimizer -------------------------------------------------------------

    py::class_<RelaxResult>(m, "RelaxResult")
        .def_property_readonly("positions", [](const RelaxResult& r) { return to_rows(r.result.final_configuration); })
        .def_property_readonly("energy", [](const RelaxResult& r) { return breakdown(r.result.final_energy); })
        .def_property_readonly("iterations", [](const RelaxResult& r) { return r.result.iterations; })
        .def_property_readonly("converged", [](const RelaxResult& r) { return r.result.converged; })
        .def_property_readonly("status", [](const RelaxResult& r) { return std::string(to_string(r.result.status)); })
        .def_property_readonly("energy_history", [](const RelaxResult& r) { return r.result.energy_history; })
        .def_readonly("penalty_rounds", &RelaxResult::penalty_rounds)
        .def_readonly("length_error", &RelaxResult::length_error)
        .def_readonly("final_params", &RelaxResult::final_params);

    m.def(
        "relax",
        [](const TriMesh& mesh, const Eigen::Ref<const Rows>& x, const EnergyParams& p, double perturbation,
           std::uint64_t seed, int max_iterations, double gradient_tolerance, double length_tolerance) {
            check_size(mesh, x);
            RelaxOptions o;
            o.minimize.perturbation_amplitude = perturbation;
            o.minimize.rng_seed = seed;
            o.minimize.max_iterations = max_iterations;
            o.minimize.gradient_tolerance = gradient_tolerance;
            o.length_tolerance = length_tolerance;
            const Configuration start = to_config(x);
            py::gil_scoped_release release;
            return relax(mesh, start, p, o);
        },
        py::arg("mesh"), py::arg("positions"), py::arg("params"), py::arg("perturbation") = 0.0,
        py::arg("seed") = 1, py::arg("max_iterations") = 50000, py::arg("gradient_tolerance") = 1e-7,
        py::arg("length_tolerance") = 1e-3);

    // Differential geometry ---------------------------------------------------

    m.def(
        "planarity",
        [](const TriMesh& mesh, const Eigen::Ref<const Rows>& x) {
            check_size(mesh, x);
            return planarity(to_config(x), mesh);
        },
        py::arg("mesh"), py::arg("positions"));
    m.def(
        "gauss_bonnet_defect",
        [](const TriMesh& mesh, const Eigen::Ref<const Rows>& x) {
            check_size(mesh, x);
            return gauss_bonnet_defect(mesh, to_config(x));
        },
        py::arg("mesh"), py::arg("positions"));
    m.def(
        "integrated_gaussian_curvature",
        [](const TriMesh& mesh, const Eigen::Ref<const Rows>& x) {
            check_size(mesh, x);
            return gaussian_curvature(mesh, to_config(x)).integrated_gaussian;
        },
        py::arg("mesh"), py::arg("positions"));
    m.def(
        "boundary_curvatures",
        [](const TriMesh& mesh, const Eigen::Ref<const Rows>& x) {
            check_size(mesh, x);
            const BoundaryGeometry g = boundary_geometry(mesh, to_config(x));
            py::dict d;
            d["vertex"] = g.vertex;
            d["weight"] = g.weight;
            d["kappa"] = g.kappa;
            d["kappa_n"] = g.kappa_n;
            d["kappa_g"] = g.kappa_g;
            return d;
        },
        py::arg("mesh"), py::arg("positions"),
        "Discrete boundary curvature, normal and geodesic parts, with arclength weights.");

    // Sweep -----------------------------------------------------------------

    py::class_<DiagramPoint>(m, "DiagramPoint")
        .def(py::init<>())
        .def_readwrite("k_l3_over_alpha", &DiagramPoint::k_l3_over_alpha)
        .def_readwrite("gamma", &DiagramPoint::gamma)
        .def_readwrite("energy", &DiagramPoint::energy)
        .def_readwrite("start_energy", &DiagramPoint::start_energy)
        .def_readwrite("mean_abs_kappa_n", &DiagramPoint::mean_abs_kappa_n)
        .def_readwrite("integrated_abs_kappa_n", &DiagramPoint::integrated_abs_kappa_n)
        .def_readwrite("integrated_K", &DiagramPoint::integrated_K)
        .def_readwrite("mean_K", &DiagramPoint::mean_K)
        .def_readwrite("planarity", &DiagramPoint::planarity)
        .def_readwrite("dominant_mode", &DiagramPoint::dominant_mode)
        .def_readwrite("mode2_amplitude", &DiagramPoint::mode2_amplitude)
        .def_readwrite("boundary_length_error", &DiagramPoint::boundary_length_error)
        .def_readwrite("gauss_bonnet_defect", &DiagramPoint::gauss_bonnet_defect)
        .def_readwrite("self_intersections", &DiagramPoint::self_intersections)
        .def_readwrite("iterations", &DiagramPoint::iterations)
        .def_readwrite("converged", &DiagramPoint::converged);

    py::class_<BifurcationDiagram>(m, "BifurcationDiagram")
        .def(py::init<>())
        .def(py::init([](std::vector<DiagramPoint> points) { return BifurcationDiagram{std::move(points)}; }),
             py::arg("points"))
        .def_readwrite("points", &BifurcationDiagram::points)
        .def("to_csv",
             [](const BifurcationDiagram& d) {
                 std::ostringstream out;
                 write_diagram_csv(out, d);
                 return out.str();
             })
        .def_static("from_csv", [](const std::string& text) {
            std::istringstream in(text);
            return read_diagram_csv(in);
        });

    m.def(
        "run_sweep",
        [](std::vector<double> values, int rings, double elongation, const std::string& mode, std::uint64_t seed,
           bool warm_start, int jobs, const EnergyParams& base) {
            SweepSchedule s;
            s.values = std::move(values);
            s.mesh = {rings, elongation, elongation_mode_from_string(mode)};
            s.seed = seed;
            s.warm_start = warm_start;
            s.jobs = jobs;
            s.base = base;
            py::gil_scoped_release release;
            return run_sweep(s);
        },
        py::arg("values"), py::arg("rings") = 16, py::arg("elongation") = 1.0, py::arg("mode") = "affine",
        py::arg("seed") = 1, py::arg("warm_start") = true, py::arg("jobs") = 1, py::arg("base") = EnergyParams{},
        "Continuation in kL^3/alpha; mode is 'affine' or 'lattice'.");

    py::enum_<TransitionType>(m, "TransitionType")
        .value("circle_to_ellipse", TransitionType::circle_to_ellipse)
        .value("planar_to_twisted", TransitionType::planar_to_twisted)
        .value("twisted_to_flat_eight", TransitionType::twisted_to_flat_eight);

    py::class_<Transition>(m, "Transition")
        .def_readonly("type", &Transition::type)
        .def_readonly("from_value", &Transition::from)
        .def_readonly("to_value", &Transition::to)
        .def("brackets", &Transition::brackets, py::arg("value"))
        .def("__repr__", [](const Transition& t) {
            std::ostringstream s;
            s << to_string(t.type) << " [" << t.from << ", " << t.to << "]";
            return s.str();
        });

    m.def(
        "detect_transitions",
        [](const BifurcationDiagram& d, double planarity, double mode_amplitude) {
            return detect_transitions(d, {planarity, mode_amplitude});
        },
        py::arg("diagram"), py::arg("planarity") = 1e-3, py::arg("mode_amplitude") = 1e-3);

    // Fits ------------------------------------------------------------------

    py::class_<ExponentFit>(m, "ExponentFit")
        .def_readonly("exponent", &ExponentFit::exponent)
        .def_readonly("exponent_stderr", &ExponentFit::exponent_stderr)
        .def_readonly("gamma_c", &ExponentFit::gamma_c)
        .def_readonly("gamma_c_stderr", &ExponentFit::gamma_c_stderr)
        .def_readonly("amplitude", &ExponentFit::amplitude)
        .def_readonly("r_squared", &ExponentFit::r_squared)
        .def_readonly("points", &ExponentFit::points);

    py::class_<LinearFit>(m, "LinearFit")
        .def_readonly("slope", &LinearFit::slope)
        .def_readonly("intercept", &LinearFit::intercept)
        .def_readonly("r_squared", &LinearFit::r_squared)
        .def_readonly("points", &LinearFit::points);

    const auto window = [](double width, bool stop_at_peak, double noise_floor, double length) {
        return FitWindow{width, stop_at_peak, noise_floor, length};
    };
    m.def(
        "fit_exponent",
        [window](const BifurcationDiagram& d, double gamma_estimate, double width, bool stop_at_peak,
                 double noise_floor, double length) {
            return fit_exponent(d, gamma_estimate, window(width, stop_at_peak, noise_floor, length));
        },
        py::arg("diagram"), py::arg("gamma_estimate"), py::arg("relative_width") = 0.25,
        py::arg("stop_at_peak") = true, py::arg("noise_floor") = 1e-4, py::arg("length") = 1.0);
    m.def(
        "fit_linear_K",
        [window](const BifurcationDiagram& d, double gamma_estimate, double width, bool stop_at_peak,
                 double noise_floor, double length) {
            return fit_linear_K(d, gamma_estimate, window(width, stop_at_peak, noise_floor, length));
        },
        py::arg("diagram"), py::arg("gamma_estimate"), py::arg("relative_width") = 0.25,
        py::arg("stop_at_peak") = true, py::arg("noise_floor") = 1e-4, py::arg("length") = 1.0);

    // Flat-disk stability -----------------------------------------------------

    py::class_<DiskSolution>(m, "DiskSolution")
        .def_readonly("radius", &DiskSolution::radius)
        .def_readonly("lagrange_multiplier", &DiskSolution::lagrange_multiplier)
        .def_readonly("gamma", &DiskSolution::gamma)
        .def("cubic_residual", &DiskSolution::cubic_residual, py::arg("sigma"), py::arg("alpha"));

    m.def("disk_solution", &disk_solution, py::arg("length"), py::arg("sigma"), py::arg("alpha"));
    m.def("second_order_coefficient", &second_order_coefficient, py::arg("mode"), py::arg("gamma"));
    m.def("critical_gamma", &critical_gamma, py::arg("mode"));
    m.def(
        "threshold_table",
        [](int max_mode) {
            std::vector<py::tuple> rows;
            for (const ThresholdRow& r : threshold_table(max_mode)) {
                rows.push_back(py::make_tuple(r.mode, r.gamma, r.k_l3_over_alpha));
            }
            return rows;
        },
        py::arg("max_mode"), "Rows of (mode, gamma, kL^3/alpha).");

    // Twisted-saddle family ---------------------------------------------------

    py::class_<SaddleFamily>(m, "SaddleFamily")
        .def(py::init([](double radius, double t) { return SaddleFamily{radius, t}; }), py::arg("radius") = 1.0,
             py::arg("t") = 0.0)
        .def_readwrite("radius", &SaddleFamily::radius)
        .def_readwrite("t", &SaddleFamily::t);

    py::class_<SeriesComparison>(m, "SeriesComparison")
        .def_readonly("quadrature", &SeriesComparison::quadrature)
        .def_readonly("series", &SeriesComparison::series)
        .def_readonly("error_estimate", &SeriesComparison::error_estimate)
        .def_property_readonly("residual", &SeriesComparison::residual);

    m.def("family_point", &family_point, py::arg("family"), py::arg("r"), py::arg("phi"));
    m.def(
        "family_metric",
        [](const SaddleFamily& f, double r, double phi) {
            const Metric g = family_metric(f, r, phi);
            return py::make_tuple(g.g_rr, g.g_rphi, g.g_phiphi);
        },
        py::arg("family"), py::arg("r"), py::arg("phi"), "Returns (g_rr, g_rphi, g_phiphi).");
    m.def("family_gaussian_K", &family_gaussian_K, py::arg("family"));
    m.def(
        "family_length", [](const SaddleFamily& f) { return family_length(f); }, py::arg("family"));
    m.def(
        "family_energy", [](const SaddleFamily& f, double sigma, double alpha) { return family_energy(f, sigma, alpha); },
        py::arg("family"), py::arg("sigma"), py::arg("alpha"));
    m.def(
        "family_boundary_curvatures",
        [](const SaddleFamily& f, double phi) {
            const BoundaryCurvatures k = family_boundary_curvatures(f, phi);
            return py::make_tuple(k.kappa_n, k.kappa_g);
        },
        py::arg("family"), py::arg("phi"), "Series (kappa_n, kappa_g) on the boundary.");
    m.def(
        "family_integrated_K",
        [](const SaddleFamily& f) {
            const GaussianCurvatureIntegral k = family_integrated_K(f);
            py::dict d;
            d["direct"] = k.direct;
            d["gauss_bonnet"] = k.gauss_bonnet;
            d["leading_order"] = k.leading_order;
            return d;
        },
        py::arg("family"));
    m.def("family_mesh", &family_mesh, py::arg("family"), py::arg("rings"), py::arg("segments"));
    m.def("gamma_star", &gamma_star);
    m.def("pitchfork_amplitude", &pitchfork_amplitude, py::arg("gamma"));
    m.def(
        "exact_radius", [](double t, double length) { return exact_radius(t, length); }, py::arg("t"),
        py::arg("length") = 1.0);
}

#include "cli.hpp"

#include "eplateau/asymptotic.hpp"
#include "eplateau/diffgeo.hpp"
#include "eplateau/fit.hpp"
#include "eplateau/mesh_io.hpp"
#include "eplateau/stability.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string_view>

#ifndef EPLATEAU_VERSION
#define EPLATEAU_VERSION "unknown"
#endif

namespace eplateau::cli {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// RunConfig
// ---------------------------------------------------------------------------

std::vector<double> RunConfig::schedule_values() const {
    std::vector<double> v = values;
    if (v.empty()) {
        if (!(step > 0.0) || !(to >= from)) {
            throw std::invalid_argument("sweep range needs step > 0 and to >= from");
        }
        const auto count = static_cast<long>(std::floor((to - from) / step + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) v.push_back(from + static_cast<double>(i) * step);
    }
    if (descending) std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

EnergyParams RunConfig::energy_params() const {
    EnergyParams p;
    p.alpha = alpha;
    p.target_length = length;
    p.length_penalty_k = penalty_k;
    if (penalty == "per_edge") {
        p.penalty_kind = LengthPenalty::per_edge;
    } else if (penalty == "total") {
        p.penalty_kind = LengthPenalty::total;
    } else {
        throw std::invalid_argument("penalty must be 'per_edge' or 'total', got '" + penalty + "'");
    }
    p.spring_k = k_l3_over_alpha * alpha / (length * length * length);
    p.validate();
    return p;
}

RelaxOptions RunConfig::relax_options() const {
    RelaxOptions ro;
    ro.minimize.max_iterations = max_iterations;
    ro.minimize.gradient_tolerance = gradient_tolerance;
    ro.minimize.restart_interval = restart_interval;
    ro.minimize.precondition = precondition;
    ro.minimize.eliminate_interior = eliminate_interior;
    ro.minimize.rng_seed = seed;
    ro.minimize.perturbation_amplitude = perturbation * length;
    ro.length_tolerance = length_tolerance;
    ro.max_penalty_rounds = max_penalty_rounds;
    ro.minimize.validate();
    return ro;
}

SweepSchedule RunConfig::sweep_schedule() const {
    SweepSchedule s;
    s.values = schedule_values();
    s.mesh = mesh;
    s.base = energy_params();
    s.base.spring_k = 0.0;
    s.relax = relax_options();
    s.seed = seed;
    s.perturbation = perturbation;
    s.warm_start = warm_start;
    s.jobs = jobs;
    s.validate();
    return s;
}

namespace {

template <typename T>
void take(const json& section, const char* key, T& field) {
    if (section.contains(key)) field = section.at(key).get<T>();
}

void check_keys(const json& section, std::string_view name, std::initializer_list<std::string_view> allowed) {
    if (!section.is_object()) throw std::invalid_argument("config section '" + std::string(name) + "' must be an object");
    for (const auto& [key, value] : section.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw std::invalid_argument("unknown config key '" + std::string(name) + "." + key + "'");
        }
    }
}

const json kEmpty = json::object();

const json& section(const json& doc, const char* name) {
    return doc.contains(name) ? doc.at(name) : kEmpty;
}

} // namespace

void apply_json(RunConfig& c, const json& input) {
    const json& doc = input.contains("config") && input.contains("tool") ? input.at("config") : input;
    check_keys(doc, "<root>", {"out", "seed", "jobs", "mesh", "energy", "minimize", "relax", "sweep", "asymptotic", "fit"});
    try {
        if (doc.contains("out")) c.out = doc.at("out").get<std::string>();
        take(doc, "seed", c.seed);
        take(doc, "jobs", c.jobs);

        const json& m = section(doc, "mesh");
        check_keys(m, "mesh", {"rings", "elongation", "mode", "input", "format"});
        take(m, "rings", c.mesh.rings);
        take(m, "elongation", c.mesh.elongation);
        if (m.contains("mode")) c.mesh.mode = elongation_mode_from_string(m.at("mode").get<std::string>());
        take(m, "input", c.mesh_input);
        take(m, "format", c.mesh_format);

        const json& e = section(doc, "energy");
        check_keys(e, "energy", {"alpha", "length", "penalty", "penalty_k"});
        take(e, "alpha", c.alpha);
        take(e, "length", c.length);
        take(e, "penalty", c.penalty);
        take(e, "penalty_k", c.penalty_k);

        const json& o = section(doc, "minimize");
        check_keys(o, "minimize", {"max_iterations", "gradient_tolerance", "restart_interval", "precondition",
                                   "eliminate_interior", "length_tolerance", "max_penalty_rounds", "perturbation"});
        take(o, "max_iterations", c.max_iterations);
        take(o, "gradient_tolerance", c.gradient_tolerance);
        take(o, "restart_interval", c.restart_interval);
        take(o, "precondition", c.precondition);
        take(o, "eliminate_interior", c.eliminate_interior);
        take(o, "length_tolerance", c.length_tolerance);
        take(o, "max_penalty_rounds", c.max_penalty_rounds);
        take(o, "perturbation", c.perturbation);

        const json& r = section(doc, "relax");
        check_keys(r, "relax", {"k_l3_over_alpha"});
        take(r, "k_l3_over_alpha", c.k_l3_over_alpha);

        const json& s = section(doc, "sweep");
        check_keys(s, "sweep", {"values", "from", "to", "step", "descending", "warm_start", "save_meshes"});
        take(s, "values", c.values);
        take(s, "from", c.from);
        take(s, "to", c.to);
        take(s, "step", c.step);
        take(s, "descending", c.descending);
        take(s, "warm_start", c.warm_start);
        take(s, "save_meshes", c.save_meshes);

        const json& a = section(doc, "asymptotic");
        check_keys(a, "asymptotic", {"gamma_min", "gamma_max", "gamma_count", "mesh_t", "rings", "segments"});
        take(a, "gamma_min", c.gamma_min);
        take(a, "gamma_max", c.gamma_max);
        take(a, "gamma_count", c.gamma_count);
        take(a, "mesh_t", c.mesh_t);
        take(a, "rings", c.family_rings);
        take(a, "segments", c.family_segments);

        const json& f = section(doc, "fit");
        check_keys(f, "fit", {"input", "gamma_estimate", "window_width", "stop_at_peak", "noise_floor"});
        take(f, "input", c.fit_input);
        take(f, "gamma_estimate", c.gamma_estimate);
        take(f, "window_width", c.window_width);
        take(f, "stop_at_peak", c.stop_at_peak);
        take(f, "noise_floor", c.noise_floor);
    } catch (const json::exception& ex) {
        throw std::invalid_argument(std::string("config: ") + ex.what());
    }
}

json to_json(const RunConfig& c) {
    return json{
        {"out", c.out.generic_string()},
        {"seed", c.seed},
        {"jobs", c.jobs},
        {"mesh",
         {{"rings", c.mesh.rings},
          {"elongation", c.mesh.elongation},
          {"mode", std::string(to_string(c.mesh.mode))},
          {"input", c.mesh_input},
          {"format", c.mesh_format}}},
        {"energy", {{"alpha", c.alpha}, {"length", c.length}, {"penalty", c.penalty}, {"penalty_k", c.penalty_k}}},
        {"minimize",
         {{"max_iterations", c.max_iterations},
          {"gradient_tolerance", c.gradient_tolerance},
          {"restart_interval", c.restart_interval},
          {"precondition", c.precondition},
          {"eliminate_interior", c.eliminate_interior},
          {"length_tolerance", c.length_tolerance},
          {"max_penalty_rounds", c.max_penalty_rounds},
          {"perturbation", c.perturbation}}},
        {"relax", {{"k_l3_over_alpha", c.k_l3_over_alpha}}},
        {"sweep",
         {{"values", c.values},
          {"from", c.from},
          {"to", c.to},
          {"step", c.step},
          {"descending", c.descending},
          {"warm_start", c.warm_start},
          {"save_meshes", c.save_meshes}}},
        {"asymptotic",
         {{"gamma_min", c.gamma_min},
          {"gamma_max", c.gamma_max},
          {"gamma_count", c.gamma_count},
          {"mesh_t", c.mesh_t},
          {"rings", c.family_rings},
          {"segments", c.family_segments}}},
        {"fit",
         {{"input", c.fit_input},
          {"gamma_estimate", c.gamma_estimate},
          {"window_width", c.window_width},
          {"stop_at_peak", c.stop_at_peak},
          {"noise_floor", c.noise_floor}}},
    };
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

namespace {

std::string number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw Error("cannot open '" + path.string() + "' for writing");
    return f;
}

struct Context {
    RunConfig config;
    std::string subcommand;
    std::vector<std::string> argv;
    bool out_given = false;
    std::ostream& out;
    std::ostream& err;
    bool quiet = false;
    std::vector<std::string> artifacts;

    fs::path path(const std::string& name) {
        artifacts.push_back(name);
        const fs::path p = config.out / name;
        fs::create_directories(p.parent_path());
        return p;
    }

    void write_manifest(const json& results = json::object()) {
        const json manifest{
            {"tool", "eplateau"},
            {"version", EPLATEAU_VERSION},
            {"subcommand", subcommand},
            {"argv", argv},
            {"config", to_json(config)},
            {"artifacts", artifacts},
            {"results", results},
        };
        std::ofstream f = open_output(config.out / "manifest.json");
        f << manifest.dump(2) << '\n';
    }
};

void write_mesh(Context& ctx, const std::string& stem, const TriMesh& mesh, const Configuration& x) {
    if (ctx.config.mesh_format == "obj") {
        write_obj(ctx.path(stem + ".obj"), mesh, x);
    } else if (ctx.config.mesh_format == "ply") {
        write_ply(ctx.path(stem + ".ply"), mesh, x);
    } else {
        throw std::invalid_argument("mesh format must be 'obj' or 'ply'");
    }
}

json report_json(const ValidationReport& r) {
    return json{
        {"passed", r.passed()},
        {"vertices", r.vertex_count},
        {"edges", r.edge_count},
        {"faces", r.face_count},
        {"euler_characteristic", r.euler_characteristic},
        {"nonmanifold_edges", r.nonmanifold_edges},
        {"orientation_inconsistencies", r.orientation_inconsistencies},
        {"boundary_cycles", r.boundary_cycle_count},
        {"boundary_loop_complete", r.boundary_loop_complete},
        {"degenerate_triangles", r.degenerate_triangles},
    };
}

int cmd_mesh(Context& ctx) {
    const RunConfig& c = ctx.config;
    DiskMesh disk = c.mesh_input.empty() ? build_mesh(c.mesh, c.length) : read_obj(fs::path(c.mesh_input));
    const ValidationReport report = validate_mesh(disk.mesh);
    const json rj = report_json(report);
    if (c.mesh_input.empty()) write_mesh(ctx, "mesh", disk.mesh, disk.positions);
    {
        std::ofstream f = open_output(ctx.path("validation.json"));
        f << rj.dump(2) << '\n';
    }
    ctx.write_manifest(rj);
    ctx.out << rj.dump(2) << '\n';
    if (!report.passed()) {
        ctx.err << "mesh failed validation\n";
        return kExitUsage;
    }
    return kExitOk;
}

int cmd_relax(Context& ctx) {
    const RunConfig& c = ctx.config;
    const EnergyParams p = c.energy_params();
    const RelaxOptions ro = c.relax_options();
    const DiskMesh disk = build_mesh(c.mesh, c.length);

    const RelaxResult r = relax(disk.mesh, disk.positions, p, ro);
    const Configuration& x = r.result.final_configuration;
    DiagramPoint pt = observe(disk.mesh, x, p);
    pt.start_energy = energy(disk.mesh, disk.positions, p).total;
    pt.iterations = r.result.iterations;
    pt.converged = r.result.converged && r.length_error < ro.length_tolerance;

    write_mesh(ctx, "relaxed", disk.mesh, x);
    {
        std::ofstream f = open_output(ctx.path("observables.csv"));
        write_diagram_csv(f, BifurcationDiagram{{pt}});
    }
    {
        std::ofstream f = open_output(ctx.path("boundary.csv"));
        write_boundary_csv(f, disk.mesh, x);
    }
    const json results{
        {"k_l3_over_alpha", pt.k_l3_over_alpha},
        {"gamma", pt.gamma},
        {"energy", pt.energy},
        {"planarity", pt.planarity},
        {"mean_abs_kappa_n", pt.mean_abs_kappa_n},
        {"boundary_length_error", pt.boundary_length_error},
        {"iterations", pt.iterations},
        {"status", std::string(to_string(r.result.status))},
        {"converged", pt.converged},
    };
    ctx.write_manifest(results);
    ctx.out << results.dump(2) << '\n';
    if (!pt.converged) {
        ctx.err << "relaxation did not converge (" << to_string(r.result.status) << ")\n";
        return kExitNumerical;
    }
    return kExitOk;
}

int cmd_sweep(Context& ctx) {
    const RunConfig& c = ctx.config;
    const SweepSchedule schedule = c.sweep_schedule();
    if (c.save_meshes) fs::create_directories(c.out / "meshes");

    auto on_point = [&](std::size_t i, const DiagramPoint& pt, const TriMesh& mesh, const Configuration& x) {
        if (c.save_meshes) {
            char name[32];
            std::snprintf(name, sizeof name, "meshes/point_%04zu", i);
            write_mesh(ctx, name, mesh, x);
        }
        if (!ctx.quiet) {
            ctx.err << "point " << i << " kL3/alpha=" << pt.k_l3_over_alpha << " planarity=" << pt.planarity
                    << " mode=" << pt.dominant_mode << " iterations=" << pt.iterations
                    << (pt.converged ? "" : " NOT CONVERGED") << '\n';
        }
    };
    const BifurcationDiagram diagram = run_sweep(schedule, on_point);
    std::sort(ctx.artifacts.begin(), ctx.artifacts.end());

    {
        std::ofstream f = open_output(ctx.path("diagram.csv"));
        write_diagram_csv(f, diagram);
    }
    int converged = 0;
    for (const auto& pt : diagram.points) converged += pt.converged ? 1 : 0;
    json transitions = json::array();
    {
        std::ofstream f = open_output(ctx.path("transitions.csv"));
        f << "type,from,to\n";
        if (converged >= 3) {
            for (const auto& t : detect_transitions(diagram)) {
                f << to_string(t.type) << ',' << number(t.from) << ',' << number(t.to) << '\n';
                transitions.push_back({{"type", std::string(to_string(t.type))}, {"from", t.from}, {"to", t.to}});
            }
        }
    }
    const json results{
        {"points", diagram.points.size()},
        {"converged", converged},
        {"transitions", transitions},
    };
    ctx.write_manifest(results);
    ctx.out << results.dump(2) << '\n';
    return kExitOk;
}

int cmd_stability(Context& ctx) {
    constexpr int kMaxMode = 6;
    const auto rows = threshold_table(kMaxMode);
    char line[96];
    ctx.out << "mode  gamma_c           kL3/alpha\n";
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%4d  %-16.10g  %-16.10g\n", r.mode, r.gamma, r.k_l3_over_alpha);
        ctx.out << line;
    }
    std::snprintf(line, sizeof line, "twisted-saddle pitchfork gamma* = %.10g\n", gamma_star());
    ctx.out << line;
    if (ctx.out_given) {
        {
            std::ofstream f = open_output(ctx.path("thresholds.csv"));
            f << "mode,gamma,k_l3_over_alpha\n";
            for (const auto& r : rows) f << r.mode << ',' << number(r.gamma) << ',' << number(r.k_l3_over_alpha) << '\n';
        }
        ctx.write_manifest();
    }
    return kExitOk;
}

int cmd_asymptotic(Context& ctx) {
    const RunConfig& c = ctx.config;
    if (c.gamma_count < 1 || !(c.gamma_min > 0.0) || !(c.gamma_max >= c.gamma_min)) {
        throw std::invalid_argument("asymptotic grid needs gamma_count >= 1 and 0 < gamma_min <= gamma_max");
    }
    {
        std::ofstream f = open_output(ctx.path("asymptotic.csv"));
        f << "gamma,t,radius,series_energy,quadrature_energy,mean_abs_kappa_n,integrated_abs_kappa_n,"
             "integrated_K,integrated_K_gauss_bonnet\n";
        for (int i = 0; i < c.gamma_count; ++i) {
            const double g = c.gamma_count == 1 ? c.gamma_min
                                                : c.gamma_min + (c.gamma_max - c.gamma_min) * i / (c.gamma_count - 1);
            const double t = pitchfork_amplitude(g);
            const SaddleFamily fam{exact_radius(t, 1.0), t};
            const SeriesComparison e = family_energy(fam, g, 1.0);
            const BoundaryAverages avg = family_boundary_averages(fam);
            const GaussianCurvatureIntegral k = family_integrated_K(fam);
            f << number(g) << ',' << number(t) << ',' << number(fam.radius) << ','
              << number(constrained_series_energy(t, g)) << ',' << number(e.quadrature) << ','
              << number(avg.mean_abs_kappa_n) << ',' << number(avg.integrated_abs_kappa_n) << ','
              << number(k.direct) << ',' << number(k.gauss_bonnet) << '\n';
        }
    }
    for (const double t : c.mesh_t) {
        const SaddleFamily fam{exact_radius(t, 1.0), t};
        const DiskMesh disk = family_mesh(fam, c.family_rings, c.family_segments);
        write_mesh(ctx, "family_t" + number(t), disk.mesh, disk.positions);
    }
    ctx.write_manifest();
    ctx.out << "wrote " << ctx.artifacts.size() << " files to " << c.out.string() << '\n';
    return kExitOk;
}

int cmd_fit(Context& ctx) {
    const RunConfig& c = ctx.config;
    if (c.fit_input.empty()) throw std::invalid_argument("fit needs --input DIAGRAM.csv");
    std::ifstream in(c.fit_input);
    if (!in) throw std::invalid_argument("cannot read '" + c.fit_input + "'");
    const BifurcationDiagram diagram = read_diagram_csv(in);

    double estimate = c.gamma_estimate;
    if (estimate <= 0.0) {
        for (const auto& t : detect_transitions(diagram)) {
            if (t.type != TransitionType::planar_to_twisted) continue;
            for (const auto& p : diagram.points) {
                if (p.k_l3_over_alpha == t.from) estimate = p.gamma;
            }
            break;
        }
        if (estimate <= 0.0) throw std::invalid_argument("no twist onset found; pass --gamma-estimate");
    }
    FitWindow w;
    w.relative_width = c.window_width;
    w.stop_at_peak = c.stop_at_peak;
    w.noise_floor = c.noise_floor;
    w.length = c.length;

    const ExponentFit f = fit_exponent(diagram, estimate, w);
    const LinearFit k = fit_linear_K(diagram, estimate, w);
    const json results{
        {"gamma_estimate", estimate},
        {"exponent", f.exponent},
        {"exponent_stderr", f.exponent_stderr},
        {"gamma_c", f.gamma_c},
        {"gamma_c_stderr", f.gamma_c_stderr},
        {"k_l3_over_alpha_c", f.gamma_c * std::numbers::sqrt3 / 4.0},
        {"amplitude", f.amplitude},
        {"r_squared", f.r_squared},
        {"points", f.points},
        {"window", {f.window_lo, f.window_hi}},
        {"integrated_K_slope", k.slope},
        {"integrated_K_intercept", k.intercept},
        {"integrated_K_r_squared", k.r_squared},
    };
    {
        std::ofstream o = open_output(ctx.path("fit.json"));
        o << results.dump(2) << '\n';
    }
    ctx.write_manifest(results);
    ctx.out << results.dump(2) << '\n';
    return kExitOk;
}

// --config may appear anywhere; it is applied before the flags so flags win.
std::string find_config(const std::vector<std::string>& args) {
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return {};
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv, argv + argc);
    RunConfig config;
    const std::string config_path = find_config(args);
    if (!config_path.empty()) {
        try {
            std::ifstream f(config_path);
            if (!f) throw std::invalid_argument("cannot read config '" + config_path + "'");
            apply_json(config, json::parse(f));
        } catch (const std::exception& ex) {
            err << "error: " << ex.what() << '\n';
            return kExitUsage;
        }
    }

    CLI::App app{"Soap film spanning an elastic loop: relaxation, sweeps and analysis", "eplateau"};
    app.set_version_flag("--version", EPLATEAU_VERSION);
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_unused;
    std::string out_dir = config.out.string();
    std::string mode = std::string(to_string(config.mesh.mode));
    bool quiet = false;
    bool no_warm_start = !config.warm_start;
    app.add_option("--config", config_unused, "JSON run configuration or manifest");
    auto* out_opt = app.add_option("--out", out_dir, "Output directory");
    app.add_option("--seed", config.seed, "Random seed");
    app.add_option("--jobs", config.jobs, "Worker threads for independent sweep points")->check(CLI::PositiveNumber);
    app.add_flag("--quiet", quiet, "No progress output");

    auto add_mesh_flags = [&](CLI::App* sub) {
        sub->add_option("--rings", config.mesh.rings, "Lattice rings around the center vertex");
        sub->add_option("--elongation", config.mesh.elongation, "Width-to-height ratio factor");
        sub->add_option("--mode", mode, "Elongation: affine or lattice")->check(CLI::IsMember({"affine", "lattice"}));
        sub->add_option("--format", config.mesh_format, "Mesh output format")->check(CLI::IsMember({"obj", "ply"}));
        sub->add_option("--length", config.length, "Boundary length L");
    };
    auto add_energy_flags = [&](CLI::App* sub) {
        sub->add_option("--alpha", config.alpha, "Bending modulus");
        sub->add_option("--penalty", config.penalty, "Length penalty: per_edge or total")
            ->check(CLI::IsMember({"per_edge", "total"}));
        sub->add_option("--penalty-k", config.penalty_k, "Length penalty stiffness (0 = default)");
        sub->add_option("--max-iterations", config.max_iterations, "Iteration cap per minimization");
        sub->add_option("--tolerance", config.gradient_tolerance, "Relative gradient tolerance");
        sub->add_option("--perturbation", config.perturbation, "Out-of-plane noise amplitude, times L");
        sub->add_option("--length-tolerance", config.length_tolerance, "Accepted relative boundary length error");
    };

    auto* mesh_cmd = app.add_subcommand("mesh", "Generate or validate a disk mesh");
    add_mesh_flags(mesh_cmd);
    mesh_cmd->add_option("--input", config.mesh_input, "Validate this OBJ instead of generating");

    auto* relax_cmd = app.add_subcommand("relax", "Relax one configuration");
    add_mesh_flags(relax_cmd);
    add_energy_flags(relax_cmd);
    relax_cmd->add_option("--k", config.k_l3_over_alpha, "Dimensionless stiffness kL^3/alpha");

    auto* sweep_cmd = app.add_subcommand("sweep", "Continuation in kL^3/alpha");
    add_mesh_flags(sweep_cmd);
    add_energy_flags(sweep_cmd);
    sweep_cmd->add_option("--values", config.values, "Explicit kL^3/alpha values")->delimiter(',');
    sweep_cmd->add_option("--from", config.from, "First kL^3/alpha");
    sweep_cmd->add_option("--to", config.to, "Last kL^3/alpha");
    sweep_cmd->add_option("--step", config.step, "kL^3/alpha increment");
    sweep_cmd->add_flag("--descending", config.descending, "Run the schedule from high to low");
    sweep_cmd->add_flag("--no-warm-start", no_warm_start, "Start every point from the flat mesh");
    sweep_cmd->add_flag("--save-meshes", config.save_meshes, "Write every relaxed configuration");

    auto* stability_cmd = app.add_subcommand("stability", "Print flat-disk instability thresholds");

    auto* asym_cmd = app.add_subcommand("asymptotic", "Twisted-saddle family: series vs quadrature");
    asym_cmd->add_option("--gamma-min", config.gamma_min, "Smallest gamma");
    asym_cmd->add_option("--gamma-max", config.gamma_max, "Largest gamma");
    asym_cmd->add_option("--gamma-count", config.gamma_count, "Grid points");
    asym_cmd->add_option("--mesh-t", config.mesh_t, "Family amplitudes to export as meshes")->delimiter(',');
    asym_cmd->add_option("--rings", config.family_rings, "Radial rings of exported meshes");
    asym_cmd->add_option("--segments", config.family_segments, "Angular segments of exported meshes");
    asym_cmd->add_option("--format", config.mesh_format, "Mesh output format")->check(CLI::IsMember({"obj", "ply"}));

    auto* fit_cmd = app.add_subcommand("fit", "Fit onset scaling laws to a diagram CSV");
    fit_cmd->add_option("--input", config.fit_input, "Diagram CSV written by sweep");
    fit_cmd->add_option("--gamma-estimate", config.gamma_estimate, "Onset estimate (default: detected)");
    fit_cmd->add_option("--width", config.window_width, "Window (gamma_c, (1 + width) gamma_c]");
    fit_cmd->add_option("--noise-floor", config.noise_floor, "Minimum <|kappa_n|> R");
    fit_cmd->add_option("--length", config.length, "Boundary length of the diagram");
    bool no_peak_stop = !config.stop_at_peak;
    fit_cmd->add_flag("--no-peak-stop", no_peak_stop, "Do not end the window at the <|kappa_n|> maximum");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    Context ctx{config, app.get_subcommands().front()->get_name(), args, out_opt->count() > 0, out, err};
    ctx.quiet = quiet;
    ctx.config.out = out_dir;
    ctx.config.warm_start = !no_warm_start;
    ctx.config.stop_at_peak = !no_peak_stop;
    ctx.out_given = ctx.out_given || ctx.config.out != fs::path(".");
    try {
        ctx.config.mesh.mode = elongation_mode_from_string(mode);
        if (mesh_cmd->parsed()) return cmd_mesh(ctx);
        if (relax_cmd->parsed()) return cmd_relax(ctx);
        if (sweep_cmd->parsed()) return cmd_sweep(ctx);
        if (stability_cmd->parsed()) return cmd_stability(ctx);
        if (asym_cmd->parsed()) return cmd_asymptotic(ctx);
        if (fit_cmd->parsed()) return cmd_fit(ctx);
    } catch (const NumericalFailure& ex) {
        err << "numerical failure: " << ex.what() << '\n';
        return kExitNumerical;
    } catch (const DegenerateGeometry& ex) {
        err << "degenerate geometry: " << ex.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace eplateau::cli

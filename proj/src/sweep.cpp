#include "eplateau/sweep.hpp"

#include "eplateau/diffgeo.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <cmath>
#include <istream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace eplateau {

std::string_view to_string(ElongationMode mode) {
    return mode == ElongationMode::affine ? "affine" : "lattice";
}

ElongationMode elongation_mode_from_string(std::string_view name) {
    if (name == "affine") return ElongationMode::affine;
    if (name == "lattice") return ElongationMode::lattice;
    throw std::invalid_argument("unknown elongation mode '" + std::string(name) + "'");
}

DiskMesh build_mesh(const MeshSpec& spec, double length) {
    DiskMesh disk = spec.mode == ElongationMode::affine ? generate_disk_mesh(spec.rings, spec.elongation)
                                                        : generate_elongated_lattice_mesh(spec.rings, spec.elongation);
    disk.positions = scale_to_boundary_length(disk.mesh, disk.positions, length);
    return disk;
}

void SweepSchedule::validate() const {
    if (values.empty()) throw std::invalid_argument("sweep schedule has no values");
    const bool ascending = values.size() < 2 || values[1] > values[0];
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0) {
            throw std::invalid_argument("sweep values must be finite and non-negative");
        }
        if (i > 0 && (ascending ? values[i] <= values[i - 1] : values[i] >= values[i - 1])) {
            throw std::invalid_argument("sweep values must be strictly monotone");
        }
    }
    base.validate();
    relax.minimize.validate();
    if (!(perturbation >= 0.0)) throw std::invalid_argument("perturbation must be >= 0");
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

DiagramPoint observe(const TriMesh& mesh, const Configuration& x, const EnergyParams& p) {
    DiagramPoint pt;
    const DimensionlessGroups groups = gamma_numeric(p.spring_k, p.target_length, p.alpha);
    pt.k_l3_over_alpha = groups.k_l3_over_alpha;
    pt.gamma = groups.gamma;
    const EnergyBreakdown e = energy(mesh, x, p);
    pt.energy = e.total;
    pt.boundary_length_error = std::abs(e.boundary_length - p.target_length) / p.target_length;

    const BoundaryGeometry bg = boundary_geometry(mesh, x);
    pt.mean_abs_kappa_n = bg.mean_abs_kappa_n();
    pt.integrated_abs_kappa_n = bg.integrated_abs_kappa_n();

    const AngleDefects defects = gaussian_curvature(mesh, x);
    pt.integrated_K = defects.integrated_gaussian;
    pt.mean_K = defects.mean_gaussian();
    pt.gauss_bonnet_defect = std::abs(defects.integrated_gaussian + defects.total_turning - 2.0 * std::numbers::pi);

    pt.planarity = planarity(x, mesh);
    const BoundaryModes modes = boundary_modes(mesh, x);
    pt.dominant_mode = modes.dominant_mode;
    pt.mode2_amplitude = modes.amplitude[2] / modes.mean_radius;
    pt.self_intersections = count_self_intersections(mesh, x);
    return pt;
}

namespace {

EnergyParams point_params(const SweepSchedule& s, double value) {
    EnergyParams p = s.base;
    const double l = p.target_length;
    p.spring_k = value * p.alpha / (l * l * l);
    return p;
}

struct PointResult {
    DiagramPoint point;
    Configuration x;
};

PointResult relax_point(const SweepSchedule& s, const DiskMesh& disk, const Configuration& start, std::size_t index) {
    const EnergyParams p = point_params(s, s.values[index]);
    RelaxOptions ro = s.relax;
    ro.minimize.rng_seed = s.seed + index;
    ro.minimize.perturbation_amplitude = s.perturbation * p.target_length;
    ro.minimize.on_iteration = nullptr;

    PointResult out;
    RelaxResult r;
    try {
        out.point.start_energy = energy(disk.mesh, start, p).total;
        r = relax(disk.mesh, start, p, ro);
    } catch (const Error&) {
        // Recorded as a failed point; the sweep goes on from the last good configuration.
        const DimensionlessGroups groups = gamma_numeric(p.spring_k, p.target_length, p.alpha);
        out.point.k_l3_over_alpha = groups.k_l3_over_alpha;
        out.point.gamma = groups.gamma;
        out.point.energy = std::numeric_limits<double>::quiet_NaN();
        out.point.converged = false;
        out.x = start;
        return out;
    }
    const double start_energy = out.point.start_energy;
    out.x = r.result.final_configuration;
    out.point = observe(disk.mesh, out.x, p);
    // Energies use the schedule's parameters, not the escalated penalty.
    out.point.start_energy = start_energy;
    out.point.iterations = r.result.iterations;
    out.point.converged = r.result.converged && r.length_error < ro.length_tolerance;
    return out;
}

} // namespace

BifurcationDiagram run_sweep(const SweepSchedule& schedule, const PointCallback& on_point) {
    schedule.validate();
    const DiskMesh disk = build_mesh(schedule.mesh, schedule.base.target_length);
    BifurcationDiagram diagram;
    diagram.points.resize(schedule.values.size());

    if (schedule.warm_start || schedule.jobs == 1) {
        Configuration current = disk.positions;
        for (std::size_t i = 0; i < schedule.values.size(); ++i) {
            PointResult r = relax_point(schedule, disk, schedule.warm_start ? current : disk.positions, i);
            diagram.points[i] = r.point;
            if (on_point) on_point(i, r.point, disk.mesh, r.x);
            // A failed point does not seed the next one.
            if (r.point.converged) current = std::move(r.x);
        }
        return diagram;
    }

    // Independent points: each slot is written by exactly one worker, so the result
    // does not depend on scheduling.
    std::atomic<std::size_t> next{0};
    std::mutex callback_mutex;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < schedule.values.size(); i = next++) {
            try {
                PointResult r = relax_point(schedule, disk, disk.positions, i);
                diagram.points[i] = r.point;
                if (on_point) {
                    const std::lock_guard lock(callback_mutex);
                    on_point(i, r.point, disk.mesh, r.x);
                }
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int threads = std::min<int>(schedule.jobs, static_cast<int>(schedule.values.size()));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return diagram;
}

std::string_view to_string(TransitionType type) {
    switch (type) {
    case TransitionType::circle_to_ellipse: return "CIRCLE->ELLIPSE";
    case TransitionType::planar_to_twisted: return "PLANAR->TWISTED";
    case TransitionType::twisted_to_flat_eight: return "TWISTED->FLAT-EIGHT";
    }
    return "UNKNOWN";
}

bool Transition::brackets(double value) const {
    return std::min(from, to) <= value && value <= std::max(from, to);
}

std::vector<Transition> detect_transitions(const BifurcationDiagram& diagram, const DetectionThresholds& th) {
    std::vector<const DiagramPoint*> pts;
    for (const auto& p : diagram.points) {
        if (p.converged) pts.push_back(&p);
    }
    if (pts.size() < 3) throw Error("detect_transitions: need at least 3 converged points");

    auto planar = [&](const DiagramPoint& p) { return p.planarity < th.planarity; };
    auto elliptic = [&](const DiagramPoint& p) {
        return p.dominant_mode == 2 && p.mode2_amplitude > th.mode_amplitude;
    };

    std::vector<Transition> out;
    bool twisted_seen = false;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const DiagramPoint& a = *pts[i - 1];
        const DiagramPoint& b = *pts[i];
        if (planar(a) && planar(b) && !elliptic(a) && elliptic(b) && !twisted_seen) {
            out.push_back({TransitionType::circle_to_ellipse, a.k_l3_over_alpha, b.k_l3_over_alpha});
        }
        if (planar(a) && !planar(b)) {
            out.push_back({TransitionType::planar_to_twisted, a.k_l3_over_alpha, b.k_l3_over_alpha});
            twisted_seen = true;
        }
        if (twisted_seen && !planar(a) && planar(b) && b.mode2_amplitude > th.mode_amplitude) {
            out.push_back({TransitionType::twisted_to_flat_eight, a.k_l3_over_alpha, b.k_l3_over_alpha});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

constexpr const char* kColumns[] = {
    "k_l3_over_alpha", "gamma",        "energy",         "start_energy",        "mean_abs_kappa_n",
    "integrated_abs_kappa_n", "integrated_K", "mean_K", "planarity",   "dominant_mode",
    "mode2_amplitude", "boundary_length_error", "gauss_bonnet_defect", "self_intersections", "iterations",
    "converged",
};

std::string number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

double parse_double(const std::string& s, int line) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error("diagram CSV line " + std::to_string(line) + ": bad number '" + s + "'");
    }
    return v;
}

int parse_int(const std::string& s, int line) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error("diagram CSV line " + std::to_string(line) + ": bad integer '" + s + "'");
    }
    return v;
}

} // namespace

std::string diagram_csv_header() {
    std::string h;
    for (const char* c : kColumns) {
        if (!h.empty()) h += ',';
        h += c;
    }
    return h;
}

void write_diagram_csv(std::ostream& out, const BifurcationDiagram& diagram) {
    out << diagram_csv_header() << '\n';
    for (const auto& p : diagram.points) {
        out << number(p.k_l3_over_alpha) << ',' << number(p.gamma) << ',' << number(p.energy) << ','
            << number(p.start_energy) << ',' << number(p.mean_abs_kappa_n) << ',' << number(p.integrated_abs_kappa_n)
            << ',' << number(p.integrated_K) << ',' << number(p.mean_K) << ',' << number(p.planarity) << ','
            << p.dominant_mode << ',' << number(p.mode2_amplitude) << ',' << number(p.boundary_length_error) << ','
            << number(p.gauss_bonnet_defect) << ',' << p.self_intersections << ',' << p.iterations << ','
            << (p.converged ? 1 : 0) << '\n';
    }
}

BifurcationDiagram read_diagram_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error("diagram CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != diagram_csv_header()) throw Error("diagram CSV header does not match the expected columns");

    BifurcationDiagram diagram;
    int number_of_line = 1;
    constexpr std::size_t kCount = std::size(kColumns);
    while (std::getline(in, line)) {
        ++number_of_line;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != kCount) {
            throw Error("diagram CSV line " + std::to_string(number_of_line) + ": expected " +
                        std::to_string(kCount) + " fields");
        }
        const int n = number_of_line;
        DiagramPoint p;
        p.k_l3_over_alpha = parse_double(f[0], n);
        p.gamma = parse_double(f[1], n);
        p.energy = parse_double(f[2], n);
        p.start_energy = parse_double(f[3], n);
        p.mean_abs_kappa_n = parse_double(f[4], n);
        p.integrated_abs_kappa_n = parse_double(f[5], n);
        p.integrated_K = parse_double(f[6], n);
        p.mean_K = parse_double(f[7], n);
        p.planarity = parse_double(f[8], n);
        p.dominant_mode = parse_int(f[9], n);
        p.mode2_amplitude = parse_double(f[10], n);
        p.boundary_length_error = parse_double(f[11], n);
        p.gauss_bonnet_defect = parse_double(f[12], n);
        p.self_intersections = parse_int(f[13], n);
        p.iterations = parse_int(f[14], n);
        p.converged = parse_int(f[15], n) != 0;
        diagram.points.push_back(p);
    }
    return diagram;
}

} // namespace eplateau

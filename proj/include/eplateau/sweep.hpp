#pragma once

#include "eplateau/energy.hpp"
#include "eplateau/mesh.hpp"
#include "eplateau/optimizer.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace eplateau {

enum class ElongationMode {
    affine,   // coordinate stretch of the regular hexagon; connectivity unchanged
    lattice,  // hexagon elongated in its lattice connectivity
};

[[nodiscard]] std::string_view to_string(ElongationMode mode);
[[nodiscard]] ElongationMode elongation_mode_from_string(std::string_view name);

struct MeshSpec {
    int rings = 16;
    double elongation = 1.0;
    ElongationMode mode = ElongationMode::affine;
};

/// Planar initial mesh with boundary length `length`.
[[nodiscard]] DiskMesh build_mesh(const MeshSpec& spec, double length = 1.0);

/// Continuation in the dimensionless stiffness kL^3/alpha. alpha and L are taken
/// from `base`; each point sets spring_k = value * alpha / L^3.
struct SweepSchedule {
    std::vector<double> values;  // kL^3/alpha, strictly monotone (descending allowed)
    MeshSpec mesh;
    EnergyParams base;           // length_penalty_k = 0 selects the default per point
    RelaxOptions relax;          // relax.minimize.rng_seed and perturbation are overridden
    std::uint64_t seed = 1;      // point i is perturbed with seed + i
    double perturbation = 1e-3 / 6.283185307179586;  // times L
    bool warm_start = true;
    int jobs = 1;                // worker threads, only used when warm_start is off

    SweepSchedule() { relax.minimize.max_iterations = 20000; }

    /// Throws std::invalid_argument when empty, not strictly monotone, or inconsistent.
    void validate() const;
};

struct DiagramPoint {
    double k_l3_over_alpha = 0.0;
    double gamma = 0.0;
    double energy = 0.0;
    double start_energy = 0.0;           // warm-start configuration under this point's parameters
    double mean_abs_kappa_n = 0.0;       // arclength average, units 1/L
    double integrated_abs_kappa_n = 0.0;
    double integrated_K = 0.0;
    double mean_K = 0.0;                 // integrated_K / film area
    double planarity = 0.0;
    int dominant_mode = 0;
    double mode2_amplitude = 0.0;        // relative to the mean boundary radius
    double boundary_length_error = 0.0;  // relative
    double gauss_bonnet_defect = 0.0;
    int self_intersections = 0;
    int iterations = 0;
    bool converged = false;
};

struct BifurcationDiagram {
    std::vector<DiagramPoint> points;
};

/// Called after each point with its index and relaxed configuration. Runs on the
/// calling thread for warm-started sweeps, on a worker otherwise (serialized).
using PointCallback = std::function<void(std::size_t index, const DiagramPoint&, const TriMesh&, const Configuration&)>;

/// Deterministic for a given schedule, also with jobs > 1.
[[nodiscard]] BifurcationDiagram run_sweep(const SweepSchedule& schedule, const PointCallback& on_point = {});

/// Observables of one relaxed configuration.
[[nodiscard]] DiagramPoint observe(const TriMesh& mesh, const Configuration& x, const EnergyParams& p);

enum class TransitionType {
    circle_to_ellipse,
    planar_to_twisted,
    twisted_to_flat_eight,
};

[[nodiscard]] std::string_view to_string(TransitionType type);

struct Transition {
    TransitionType type;
    double from = 0.0;  // kL^3/alpha of the last point before the change
    double to = 0.0;    // kL^3/alpha of the first point after it

    [[nodiscard]] bool brackets(double value) const;
};

struct DetectionThresholds {
    double planarity = 1e-3;
    double mode_amplitude = 1e-3;  // relative to the mean boundary radius
};

/// Scans converged points in diagram order. Requires at least 3 converged points.
[[nodiscard]] std::vector<Transition> detect_transitions(const BifurcationDiagram& diagram,
                                                         const DetectionThresholds& thresholds = {});

/// Fixed-column CSV, one row per point, shortest round-trip number formatting.
void write_diagram_csv(std::ostream& out, const BifurcationDiagram& diagram);
[[nodiscard]] BifurcationDiagram read_diagram_csv(std::istream& in);
[[nodiscard]] std::string diagram_csv_header();

} // namespace eplateau

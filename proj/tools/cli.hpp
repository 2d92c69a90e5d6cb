#pragma once

#include "eplateau/sweep.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace eplateau::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// Every tunable of every subcommand, in dimensionless form (alpha = L = 1 unless set).
/// Loaded from a JSON document, then overridden by command-line flags.
struct RunConfig {
    std::filesystem::path out = ".";
    std::uint64_t seed = 1;
    int jobs = 1;

    MeshSpec mesh;
    std::string mesh_input;     // validate this OBJ instead of generating a mesh
    std::string mesh_format = "obj";

    double alpha = 1.0;
    double length = 1.0;
    std::string penalty = "per_edge";
    double penalty_k = 0.0;  // 0 selects the default stiffness

    int max_iterations = 20000;
    double gradient_tolerance = 1e-7;
    int restart_interval = 2000;
    bool precondition = true;
    bool eliminate_interior = true;
    double length_tolerance = 1e-3;
    int max_penalty_rounds = 5;
    double perturbation = 1e-3 / 6.283185307179586;  // times L

    double k_l3_over_alpha = 100.0;

    std::vector<double> values;  // explicit schedule; otherwise from..to by step
    double from = 500.0;
    double to = 900.0;
    double step = 10.0;
    bool descending = false;
    bool warm_start = true;
    bool save_meshes = false;

    double gamma_min = 2500.0;
    double gamma_max = 4500.0;
    int gamma_count = 41;
    std::vector<double> mesh_t = {0.1, 0.3, 0.6};
    int family_rings = 24;
    int family_segments = 96;

    std::string fit_input;
    double gamma_estimate = 0.0;  // 0 = onset from detect_transitions
    double window_width = 0.25;
    bool stop_at_peak = true;
    double noise_floor = 1e-4;

    /// Sweep values after expanding from/to/step.
    [[nodiscard]] std::vector<double> schedule_values() const;
    [[nodiscard]] EnergyParams energy_params() const;
    [[nodiscard]] RelaxOptions relax_options() const;
    [[nodiscard]] SweepSchedule sweep_schedule() const;
};

/// Throws std::invalid_argument on unknown keys or wrong types. A run manifest is
/// accepted too: its "config" member is used.
void apply_json(RunConfig& config, const nlohmann::json& doc);
[[nodiscard]] nlohmann::json to_json(const RunConfig& config);

/// Full command line including argv[0]. Never throws; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace eplateau::cli

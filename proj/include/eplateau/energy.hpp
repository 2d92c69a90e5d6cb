#pragma once

#include "eplateau/mesh.hpp"
#include "eplateau/types.hpp"

namespace eplateau {

enum class LengthPenalty {
    total,     // k_L (sum |e| - L)^2 over the whole boundary
    per_edge,  // k_L sum (|e| - L/n)^2
};

/// Parameters of the discrete film + filament energy.
struct EnergyParams {
    double alpha = 1.0;             // filament bending modulus
    double spring_k = 0.0;          // interior zero-rest-length spring stiffness
    double target_length = 1.0;     // boundary length L
    double length_penalty_k = 0.0;  // boundary inextensibility penalty stiffness
    LengthPenalty penalty_kind = LengthPenalty::per_edge;

    /// Throws std::invalid_argument unless alpha > 0, spring_k >= 0, L > 0, penalty >= 0.
    void validate() const;
};

struct EnergyBreakdown {
    double bending = 0.0;
    double springs = 0.0;
    double length_penalty = 0.0;
    double total = 0.0;
    double boundary_length = 0.0;
};

/// Evaluates bending + springs + length penalty. Throws DegenerateGeometry when a
/// boundary edge is shorter than 1e-12 L.
[[nodiscard]] EnergyBreakdown energy(const TriMesh& mesh, const Configuration& x, const EnergyParams& p);

/// Exact gradient of energy(...).total. The breakdown is returned through `out`
/// when non-null so callers avoid a second pass.
[[nodiscard]] Configuration gradient(const TriMesh& mesh, const Configuration& x, const EnergyParams& p,
                                     EnergyBreakdown* out = nullptr);

/// sigma = 4k/sqrt(3): surface tension of an equilateral spring network.
[[nodiscard]] double sigma_from_spring_k(double spring_k);
[[nodiscard]] double spring_k_from_sigma(double sigma);

struct DimensionlessGroups {
    double k_l3_over_alpha = 0.0;  // kL^3/alpha
    double gamma = 0.0;            // sigma L^3/alpha
};

[[nodiscard]] DimensionlessGroups gamma_numeric(double spring_k, double length, double alpha);

} // namespace eplateau

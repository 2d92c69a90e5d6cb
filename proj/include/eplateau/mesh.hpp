#pragma once

#include "eplateau/types.hpp"

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

namespace eplateau {

using Triangle = std::array<int, 3>;
using Edge = std::pair<int, int>;

/// Triangulated topological disk with an ordered boundary loop.
///
/// Triangles are counterclockwise in the reference plane; the boundary loop
/// follows the direction its edges have inside their triangles, so it is
/// counterclockwise too. Instances are immutable once built.
class TriMesh {
public:
    TriMesh() = default;

    /// Derives edges and the boundary loop from raw triangles. Does not
    /// throw on non-disk input; use validate_mesh() to check invariants.
    static TriMesh from_triangles(int vertex_count, std::vector<Triangle> triangles);

    [[nodiscard]] int vertex_count() const noexcept { return vertex_count_; }
    [[nodiscard]] const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    [[nodiscard]] const std::vector<int>& boundary_loop() const noexcept { return boundary_loop_; }
    [[nodiscard]] const std::vector<Edge>& interior_edges() const noexcept { return interior_edges_; }
    [[nodiscard]] const std::vector<Edge>& boundary_edges() const noexcept { return boundary_edges_; }
    [[nodiscard]] const std::vector<bool>& is_boundary_vertex() const noexcept { return on_boundary_; }

    [[nodiscard]] std::size_t edge_count() const noexcept {
        return interior_edges_.size() + boundary_edges_.size();
    }

private:
    int vertex_count_ = 0;
    std::vector<Triangle> triangles_;
    std::vector<int> boundary_loop_;
    std::vector<Edge> interior_edges_;
    std::vector<Edge> boundary_edges_;
    std::vector<bool> on_boundary_;
};

struct ValidationReport {
    int vertex_count = 0;
    int edge_count = 0;
    int face_count = 0;
    int euler_characteristic = 0;
    int nonmanifold_edges = 0;          // edges with more than two incident triangles
    int orientation_inconsistencies = 0;
    int boundary_cycle_count = 0;
    bool boundary_loop_complete = false;  // stored loop is simple and covers every boundary edge
    bool degenerate_triangles = false;    // repeated vertex index or out-of-range index

    [[nodiscard]] bool passed() const noexcept {
        return euler_characteristic == 1 && nonmanifold_edges == 0 && orientation_inconsistencies == 0 &&
               boundary_cycle_count == 1 && boundary_loop_complete && !degenerate_triangles;
    }
};

[[nodiscard]] ValidationReport validate_mesh(const TriMesh& mesh);

struct DiskMesh {
    TriMesh mesh;
    Configuration positions;
};

/// Equilateral-lattice hexagon whose top and bottom sides have `long_side`
/// edges and whose four slanted sides have `short_side` edges. Planar, unit
/// spacing, centered on the vertex centroid.
[[nodiscard]] DiskMesh generate_hexagon_mesh(int long_side, int short_side);

/// Hexagonal-lattice disk with `rings` rings around a center vertex and unit
/// lattice spacing, planar at z = 0. The configuration is stretched by
/// `elongation` along x and 1/elongation along y (area preserving).
[[nodiscard]] DiskMesh generate_disk_mesh(int rings, double elongation = 1.0);

/// Lattice hexagon elongated in its connectivity, not just its coordinates:
/// short sides of `rings` edges and long sides of round((2 e - 1) rings), so the
/// width-to-height ratio is `elongation` times that of the regular hexagon.
[[nodiscard]] DiskMesh generate_elongated_lattice_mesh(int rings, double elongation);

/// Total length of the boundary polygon.
[[nodiscard]] double boundary_length(const TriMesh& mesh, const Configuration& x);

/// Uniformly rescales `x` about its centroid so that the boundary length equals `target_length`.
[[nodiscard]] Configuration scale_to_boundary_length(const TriMesh& mesh, const Configuration& x,
                                                     double target_length);

} // namespace eplateau

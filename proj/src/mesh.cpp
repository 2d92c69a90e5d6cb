#include "eplateau/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace eplateau {

namespace {

struct EdgeIncidence {
    int forward = 0;   // occurrences as (min, max)
    int backward = 0;  // occurrences as (max, min)
    [[nodiscard]] int total() const { return forward + backward; }
};

using EdgeTable = std::map<Edge, EdgeIncidence>;

EdgeTable tabulate_edges(const std::vector<Triangle>& triangles) {
    EdgeTable table;
    for (const auto& tri : triangles) {
        for (int c = 0; c < 3; ++c) {
            const int a = tri[c];
            const int b = tri[(c + 1) % 3];
            if (a == b) continue;
            auto& inc = table[{std::min(a, b), std::max(a, b)}];
            (a < b ? inc.forward : inc.backward) += 1;
        }
    }
    return table;
}

int find_root(std::vector<int>& parent, int v) {
    while (parent[v] != v) {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    return v;
}

} // namespace

TriMesh TriMesh::from_triangles(int vertex_count, std::vector<Triangle> triangles) {
    if (vertex_count < 0) throw std::invalid_argument("vertex_count must be non-negative");
    TriMesh mesh;
    mesh.vertex_count_ = vertex_count;
    mesh.triangles_ = std::move(triangles);
    mesh.on_boundary_.assign(static_cast<std::size_t>(vertex_count), false);

    const EdgeTable table = tabulate_edges(mesh.triangles_);

    // Directed boundary half-edges, oriented as they occur in their triangle.
    std::map<int, int> next;
    std::vector<Edge> boundary_all;
    for (const auto& [edge, inc] : table) {
        if (inc.total() == 1) {
            const Edge directed = inc.forward == 1 ? edge : Edge{edge.second, edge.first};
            next.emplace(directed.first, directed.second);
            boundary_all.push_back(directed);
        } else {
            mesh.interior_edges_.push_back(edge);
        }
    }

    if (!next.empty()) {
        const int start = next.begin()->first;
        std::vector<bool> seen(static_cast<std::size_t>(vertex_count), false);
        int v = start;
        while (v >= 0 && v < vertex_count && !seen[v]) {
            seen[v] = true;
            mesh.boundary_loop_.push_back(v);
            auto it = next.find(v);
            if (it == next.end()) break;
            v = it->second;
        }
    }

    const auto& loop = mesh.boundary_loop_;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        mesh.boundary_edges_.emplace_back(loop[i], loop[(i + 1) % loop.size()]);
    }
    // Boundary edges outside the stored loop (only for invalid meshes).
    for (const auto& e : boundary_all) {
        if (std::find(mesh.boundary_edges_.begin(), mesh.boundary_edges_.end(), e) == mesh.boundary_edges_.end()) {
            mesh.boundary_edges_.push_back(e);
        }
    }
    for (const auto& [a, b] : mesh.boundary_edges_) {
        if (a >= 0 && a < vertex_count) mesh.on_boundary_[a] = true;
        if (b >= 0 && b < vertex_count) mesh.on_boundary_[b] = true;
    }
    return mesh;
}

ValidationReport validate_mesh(const TriMesh& mesh) {
    ValidationReport report;
    const int n = mesh.vertex_count();
    report.vertex_count = n;
    report.face_count = static_cast<int>(mesh.triangles().size());

    for (const auto& tri : mesh.triangles()) {
        for (int c = 0; c < 3; ++c) {
            if (tri[c] < 0 || tri[c] >= n || tri[c] == tri[(c + 1) % 3]) report.degenerate_triangles = true;
        }
    }

    const EdgeTable table = tabulate_edges(mesh.triangles());
    report.edge_count = static_cast<int>(table.size());
    report.euler_characteristic = report.vertex_count - report.edge_count + report.face_count;

    std::vector<Edge> boundary;
    for (const auto& [edge, inc] : table) {
        if (inc.total() > 2) {
            ++report.nonmanifold_edges;
        } else if (inc.total() == 2) {
            if (inc.forward != 1) ++report.orientation_inconsistencies;
        } else {
            boundary.push_back(edge);
        }
    }

    std::vector<int> parent(static_cast<std::size_t>(std::max(n, 0)));
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<bool> touched(parent.size(), false);
    for (const auto& [a, b] : boundary) {
        if (a < 0 || b < 0 || a >= n || b >= n) continue;
        touched[a] = touched[b] = true;
        parent[find_root(parent, a)] = find_root(parent, b);
    }
    for (int v = 0; v < n; ++v) {
        if (touched[v] && find_root(parent, v) == v) ++report.boundary_cycle_count;
    }

    const auto& loop = mesh.boundary_loop();
    std::vector<int> sorted_loop = loop;
    std::sort(sorted_loop.begin(), sorted_loop.end());
    const bool simple = std::adjacent_find(sorted_loop.begin(), sorted_loop.end()) == sorted_loop.end();
    bool covers = loop.size() == boundary.size() && loop.size() >= 3;
    if (covers) {
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const int a = loop[i];
            const int b = loop[(i + 1) % loop.size()];
            if (!std::binary_search(boundary.begin(), boundary.end(), Edge{std::min(a, b), std::max(a, b)})) {
                covers = false;
                break;
            }
        }
    }
    report.boundary_loop_complete = simple && covers;
    return report;
}

DiskMesh generate_hexagon_mesh(int long_side, int short_side) {
    if (short_side < 1 || long_side < short_side) {
        throw std::invalid_argument("generate_hexagon_mesh: need 1 <= short_side <= long_side");
    }
    const int a = long_side;
    const int b = short_side;

    // Axial lattice coordinates (q, r): row r holds a + b + 1 - |r| vertices.
    std::map<std::pair<int, int>, int> index;
    std::vector<std::pair<int, int>> axial;
    for (int r = -b; r <= b; ++r) {
        const int q_min = -((a + b) / 2) + std::max(0, -r);
        const int count = a + b + 1 - std::abs(r);
        for (int q = q_min; q < q_min + count; ++q) {
            index[{q, r}] = static_cast<int>(axial.size());
            axial.emplace_back(q, r);
        }
    }
    auto lookup = [&](int q, int r) -> int {
        auto it = index.find({q, r});
        return it == index.end() ? -1 : it->second;
    };

    std::vector<Triangle> triangles;
    for (const auto& [q, r] : axial) {
        const int v = lookup(q, r);
        const int right = lookup(q + 1, r);
        const int upper = lookup(q, r + 1);
        if (right >= 0 && upper >= 0) triangles.push_back({v, right, upper});
        const int lower = lookup(q + 1, r - 1);
        if (lower >= 0 && right >= 0) triangles.push_back({v, lower, right});
    }

    const double half_sqrt3 = std::sqrt(3.0) / 2.0;
    Configuration x(3, static_cast<Eigen::Index>(axial.size()));
    for (std::size_t i = 0; i < axial.size(); ++i) {
        const auto [q, r] = axial[i];
        x.col(static_cast<Eigen::Index>(i)) = Vec3(q + 0.5 * r, half_sqrt3 * r, 0.0);
    }
    x.colwise() -= Vec3(x.rowwise().mean());

    TriMesh mesh = TriMesh::from_triangles(static_cast<int>(axial.size()), std::move(triangles));
    return {std::move(mesh), std::move(x)};
}

DiskMesh generate_disk_mesh(int rings, double elongation) {
    if (rings < 1) throw std::invalid_argument("generate_disk_mesh: rings must be >= 1");
    if (!std::isfinite(elongation) || elongation <= 0.0) {
        throw std::invalid_argument("generate_disk_mesh: elongation must be finite and positive");
    }
    DiskMesh disk = generate_hexagon_mesh(rings, rings);
    disk.positions.row(0) *= elongation;
    disk.positions.row(1) /= elongation;
    return disk;
}

DiskMesh generate_elongated_lattice_mesh(int rings, double elongation) {
    if (rings < 1) throw std::invalid_argument("generate_elongated_lattice_mesh: rings must be >= 1");
    if (!std::isfinite(elongation) || elongation < 1.0) {
        throw std::invalid_argument("generate_elongated_lattice_mesh: elongation must be finite and >= 1");
    }
    // Width / height of the lattice hexagon is (a + b) / (2 b) relative to the regular one.
    const int long_side = static_cast<int>(std::lround((2.0 * elongation - 1.0) * rings));
    return generate_hexagon_mesh(std::max(long_side, rings), rings);
}

double boundary_length(const TriMesh& mesh, const Configuration& x) {
    double total = 0.0;
    for (const auto& [a, b] : mesh.boundary_edges()) total += (x.col(b) - x.col(a)).norm();
    return total;
}

Configuration scale_to_boundary_length(const TriMesh& mesh, const Configuration& x, double target_length) {
    if (!(target_length > 0.0)) throw std::invalid_argument("target length must be positive");
    const double current = boundary_length(mesh, x);
    if (!(current > 0.0)) throw DegenerateGeometry("boundary has zero length");
    const Vec3 centroid = x.rowwise().mean();
    Configuration scaled = x;
    scaled.colwise() -= centroid;
    scaled *= target_length / current;
    scaled.colwise() += centroid;
    return scaled;
}

} // namespace eplateau

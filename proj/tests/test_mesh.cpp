#include "eplateau/mesh.hpp"
#include "eplateau/mesh_io.hpp"

#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>

using namespace eplateau;

namespace {

double signed_area(const TriMesh& mesh, const Configuration& x) {
    const auto& loop = mesh.boundary_loop();
    double a = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Vec3 p = x.col(loop[i]);
        const Vec3 q = x.col(loop[(i + 1) % loop.size()]);
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

struct Box {
    double width;
    double height;
};

Box bounding_box(const Configuration& x) {
    return {x.row(0).maxCoeff() - x.row(0).minCoeff(), x.row(1).maxCoeff() - x.row(1).minCoeff()};
}

} // namespace

TEST_CASE("disk mesh counts follow the lattice formulas") {
    for (int m = 1; m <= 30; ++m) {
        const DiskMesh d = generate_disk_mesh(m);
        CAPTURE(m);
        CHECK(d.mesh.vertex_count() == 1 + 3 * m * (m + 1));
        CHECK(d.mesh.triangles().size() == static_cast<std::size_t>(6 * m * m));
        CHECK(d.mesh.boundary_loop().size() == static_cast<std::size_t>(6 * m));
        CHECK(boundary_length(d.mesh, d.positions) == doctest::Approx(6.0 * m).epsilon(1e-12));
        CHECK(d.positions.row(2).cwiseAbs().maxCoeff() == 0.0);
        for (const double e : {1.0, 2.0, 3.0}) {
            const ValidationReport r = validate_mesh(generate_disk_mesh(m, e).mesh);
            CHECK(r.passed());
            CHECK(r.euler_characteristic == 1);
        }
    }
}

TEST_CASE("small reference meshes") {
    const DiskMesh twelve = generate_disk_mesh(12);
    CHECK(twelve.mesh.vertex_count() == 469);
    CHECK(twelve.mesh.boundary_loop().size() == 72);

    const DiskMesh one = generate_disk_mesh(1);
    const ValidationReport r = validate_mesh(one.mesh);
    CHECK(r.vertex_count == 7);
    CHECK(r.edge_count == 12);
    CHECK(r.face_count == 6);
    CHECK(r.euler_characteristic == 1);
    CHECK(one.mesh.boundary_loop().size() == 6);
    CHECK(one.mesh.interior_edges().size() == 6);
}

TEST_CASE("affine elongation stretches the bounding box and keeps connectivity") {
    const DiskMesh regular = generate_disk_mesh(2);
    const DiskMesh stretched = generate_disk_mesh(2, 1.5);
    const Box a = bounding_box(regular.positions);
    const Box b = bounding_box(stretched.positions);
    CHECK((b.width / b.height) / (a.width / a.height) == doctest::Approx(2.25).epsilon(1e-12));
    CHECK(regular.mesh.triangles() == stretched.mesh.triangles());
    CHECK(regular.mesh.boundary_loop() == stretched.mesh.boundary_loop());
}

TEST_CASE("boundary loop is counterclockwise") {
    for (const int m : {1, 3, 8}) {
        const DiskMesh d = generate_disk_mesh(m, 1.3);
        CHECK(signed_area(d.mesh, d.positions) > 0.0);
    }
    const DiskMesh h = generate_hexagon_mesh(9, 4);
    CHECK(signed_area(h.mesh, h.positions) > 0.0);
}

TEST_CASE("hexagon and lattice-elongated meshes") {
    for (int b = 1; b <= 6; ++b) {
        for (int a = b; a <= b + 7; ++a) {
            const DiskMesh d = generate_hexagon_mesh(a, b);
            CAPTURE(a);
            CAPTURE(b);
            CHECK(validate_mesh(d.mesh).passed());
            CHECK(d.mesh.vertex_count() == (2 * b + 1) * (a + b + 1) - b * (b + 1));
            CHECK(d.mesh.boundary_loop().size() == static_cast<std::size_t>(2 * a + 4 * b));
            CHECK(d.positions.rowwise().mean().norm() < 1e-12);
        }
    }
    const DiskMesh e = generate_elongated_lattice_mesh(16, 1.6);
    CHECK(e.mesh.vertex_count() == 1444);
    const Box box = bounding_box(e.positions);
    const Box reg = bounding_box(generate_disk_mesh(16).positions);
    CHECK((box.width / box.height) / (reg.width / reg.height) == doctest::Approx(1.6).epsilon(0.02));
    CHECK(generate_elongated_lattice_mesh(5, 1.0).mesh.vertex_count() == generate_disk_mesh(5).mesh.vertex_count());
}

TEST_CASE("generator preconditions") {
    CHECK_THROWS_AS((void)generate_disk_mesh(0), std::invalid_argument);
    CHECK_THROWS_AS((void)generate_disk_mesh(3, std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS((void)generate_disk_mesh(3, INFINITY), std::invalid_argument);
    CHECK_THROWS_AS((void)generate_hexagon_mesh(2, 3), std::invalid_argument);
    CHECK_THROWS_AS((void)generate_elongated_lattice_mesh(3, 0.5), std::invalid_argument);
}

TEST_CASE("validation detects a puncture") {
    const DiskMesh d = generate_disk_mesh(3);
    const auto& on_boundary = d.mesh.is_boundary_vertex();
    std::vector<Triangle> tris = d.mesh.triangles();
    // Interior triangle: none of its vertices lies on the boundary.
    auto it = std::find_if(tris.begin(), tris.end(), [&](const Triangle& t) {
        return !on_boundary[t[0]] && !on_boundary[t[1]] && !on_boundary[t[2]];
    });
    REQUIRE(it != tris.end());
    tris.erase(it);
    const ValidationReport r = validate_mesh(TriMesh::from_triangles(d.mesh.vertex_count(), tris));
    CHECK_FALSE(r.passed());
    CHECK(r.boundary_cycle_count == 2);
    CHECK(r.euler_characteristic == 0);
}

TEST_CASE("validation detects a flipped triangle") {
    const DiskMesh d = generate_disk_mesh(3);
    const auto& on_boundary = d.mesh.is_boundary_vertex();
    std::vector<Triangle> tris = d.mesh.triangles();
    auto it = std::find_if(tris.begin(), tris.end(), [&](const Triangle& t) {
        return !on_boundary[t[0]] && !on_boundary[t[1]] && !on_boundary[t[2]];
    });
    REQUIRE(it != tris.end());
    std::swap((*it)[1], (*it)[2]);
    const ValidationReport r = validate_mesh(TriMesh::from_triangles(d.mesh.vertex_count(), tris));
    CHECK_FALSE(r.passed());
    CHECK(r.orientation_inconsistencies == 3);
}

TEST_CASE("validation detects degenerate and nonmanifold input") {
    const TriMesh repeated = TriMesh::from_triangles(3, {{0, 1, 1}});
    CHECK(validate_mesh(repeated).degenerate_triangles);
    const TriMesh fan = TriMesh::from_triangles(5, {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}});
    const ValidationReport r = validate_mesh(fan);
    CHECK(r.nonmanifold_edges == 1);
    CHECK_FALSE(r.passed());
}

TEST_CASE("edge sets partition the mesh edges") {
    const DiskMesh d = generate_disk_mesh(4);
    std::set<Edge> all;
    for (auto [a, b] : d.mesh.interior_edges()) all.insert({std::min(a, b), std::max(a, b)});
    for (auto [a, b] : d.mesh.boundary_edges()) all.insert({std::min(a, b), std::max(a, b)});
    CHECK(all.size() == d.mesh.edge_count());
    CHECK(static_cast<int>(d.mesh.edge_count()) == validate_mesh(d.mesh).edge_count);
}

TEST_CASE("scaling to a boundary length") {
    const DiskMesh d = generate_disk_mesh(5, 1.4);
    const Configuration x = scale_to_boundary_length(d.mesh, d.positions, 2.5);
    CHECK(boundary_length(d.mesh, x) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK((x.rowwise().mean() - d.positions.rowwise().mean()).norm() < 1e-12);
    CHECK_THROWS_AS((void)scale_to_boundary_length(d.mesh, d.positions, 0.0), std::invalid_argument);
    const Configuration collapsed = Configuration::Zero(3, d.mesh.vertex_count());
    CHECK_THROWS_AS((void)scale_to_boundary_length(d.mesh, collapsed, 1.0), DegenerateGeometry);
}

TEST_CASE("OBJ round trip is exact") {
    DiskMesh d = generate_disk_mesh(4, 1.2);
    d.positions.row(2) = Eigen::RowVectorXd::LinSpaced(d.mesh.vertex_count(), -0.3, 0.7).array().sin();
    std::stringstream ss;
    write_obj(ss, d.mesh, d.positions);
    const DiskMesh back = read_obj(ss);
    CHECK(back.mesh.triangles() == d.mesh.triangles());
    CHECK(back.positions == d.positions);
    CHECK(validate_mesh(back.mesh).passed());
}

TEST_CASE("OBJ reader handles common variants") {
    std::istringstream in(
        "# comment\n"
        "o square\n"
        "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
        "vt 0 0\nvn 0 0 1\n"
        "f 1/1/1 2/1/1 3/1/1 4/1/1\n");
    const DiskMesh quad = read_obj(in);
    CHECK(quad.mesh.vertex_count() == 4);
    REQUIRE(quad.mesh.triangles().size() == 2);
    CHECK(validate_mesh(quad.mesh).passed());

    std::istringstream neg("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n");
    const DiskMesh tri = read_obj(neg);
    CHECK(tri.mesh.triangles().front() == Triangle{0, 1, 2});

    std::istringstream bad_index("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 7\n");
    CHECK_THROWS_AS((void)read_obj(bad_index), Error);
    std::istringstream bad_vertex("v 0 zero 0\n");
    CHECK_THROWS_AS((void)read_obj(bad_vertex), Error);
    std::istringstream short_face("v 0 0 0\nv 1 0 0\nf 1 2\n");
    CHECK_THROWS_AS((void)read_obj(short_face), Error);
}

TEST_CASE("PLY and boundary CSV headers") {
    const DiskMesh d = generate_disk_mesh(2);
    std::ostringstream ply;
    write_ply(ply, d.mesh, d.positions);
    const std::string s = ply.str();
    CHECK(s.rfind("ply\nformat ascii 1.0\n", 0) == 0);
    CHECK(s.find("element vertex 19\n") != std::string::npos);
    CHECK(s.find("element face 24\n") != std::string::npos);

    std::ostringstream csv;
    write_boundary_csv(csv, d.mesh, d.positions);
    std::istringstream lines(csv.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "index,s,kappa,kappa_n,kappa_g,turning");
    int rows = 0;
    for (std::string line; std::getline(lines, line);) ++rows;
    CHECK(rows == 12);
}

#include "eplateau/mesh_io.hpp"

#include "eplateau/diffgeo.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace eplateau {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    return out;
}

// Shortest decimal form that reads back to the same double.
std::string exact(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

int parse_index(const std::string& token, int vertex_count, int line) {
    const std::string head = token.substr(0, token.find('/'));
    int value = 0;
    const auto res = std::from_chars(head.data(), head.data() + head.size(), value);
    if (res.ec != std::errc() || res.ptr != head.data() + head.size() || value == 0) {
        throw Error("OBJ line " + std::to_string(line) + ": bad face index '" + token + "'");
    }
    const int index = value > 0 ? value - 1 : vertex_count + value;
    if (index < 0 || index >= vertex_count) {
        throw Error("OBJ line " + std::to_string(line) + ": face index out of range");
    }
    return index;
}

} // namespace

void write_obj(std::ostream& out, const TriMesh& mesh, const Configuration& x) {
    if (x.cols() != mesh.vertex_count()) throw std::invalid_argument("write_obj: configuration size mismatch");
    for (Eigen::Index v = 0; v < x.cols(); ++v) {
        out << "v " << exact(x(0, v)) << ' ' << exact(x(1, v)) << ' ' << exact(x(2, v)) << '\n';
    }
    for (const auto& t : mesh.triangles()) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_obj(const std::filesystem::path& path, const TriMesh& mesh, const Configuration& x) {
    auto out = open_for_write(path);
    write_obj(out, mesh, x);
}

DiskMesh read_obj(std::istream& in) {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x() >> p.y() >> p.z())) throw Error("OBJ line " + std::to_string(number) + ": bad vertex");
            vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string token;
            while (ls >> token) poly.push_back(parse_index(token, static_cast<int>(vertices.size()), number));
            if (poly.size() < 3) throw Error("OBJ line " + std::to_string(number) + ": face with fewer than 3 vertices");
            for (std::size_t i = 1; i + 1 < poly.size(); ++i) triangles.push_back({poly[0], poly[i], poly[i + 1]});
        }
    }
    Configuration x(3, static_cast<Eigen::Index>(vertices.size()));
    for (std::size_t i = 0; i < vertices.size(); ++i) x.col(static_cast<Eigen::Index>(i)) = vertices[i];
    return {TriMesh::from_triangles(static_cast<int>(vertices.size()), std::move(triangles)), std::move(x)};
}

DiskMesh read_obj(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return read_obj(in);
}

void write_ply(std::ostream& out, const TriMesh& mesh, const Configuration& x) {
    if (x.cols() != mesh.vertex_count()) throw std::invalid_argument("write_ply: configuration size mismatch");
    out << "ply\nformat ascii 1.0\n"
        << "element vertex " << x.cols() << "\nproperty double x\nproperty double y\nproperty double z\n"
        << "element face " << mesh.triangles().size() << "\nproperty list uchar int vertex_indices\n"
        << "end_header\n";
    for (Eigen::Index v = 0; v < x.cols(); ++v) {
        out << exact(x(0, v)) << ' ' << exact(x(1, v)) << ' ' << exact(x(2, v)) << '\n';
    }
    for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_ply(const std::filesystem::path& path, const TriMesh& mesh, const Configuration& x) {
    auto out = open_for_write(path);
    write_ply(out, mesh, x);
}

void write_boundary_csv(std::ostream& out, const TriMesh& mesh, const Configuration& x) {
    const BoundaryGeometry bg = boundary_geometry(mesh, x);
    const AngleDefects defects = gaussian_curvature(mesh, x);
    out << "index,s,kappa,kappa_n,kappa_g,turning\n";
    out << std::setprecision(17);
    const auto& loop = mesh.boundary_loop();
    double s = 0.0;
    for (std::size_t i = 0; i < bg.vertex.size(); ++i) {
        const int v = bg.vertex[i];
        out << v << ',' << s << ',' << bg.kappa[i] << ',' << bg.kappa_n[i] << ',' << bg.kappa_g[i] << ','
            << defects.defect[static_cast<std::size_t>(v)] << '\n';
        s += (x.col(loop[(i + 1) % loop.size()]) - x.col(loop[i])).norm();
    }
}

} // namespace eplateau

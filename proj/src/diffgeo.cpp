#include "eplateau/diffgeo.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace eplateau {

namespace {

constexpr double kPi = std::numbers::pi;

double angle_between(const Vec3& u, const Vec3& v) { return std::atan2(u.cross(v).norm(), u.dot(v)); }

void require_nondegenerate(const Vec3& a, const Vec3& b, const Vec3& c, const Triangle& tri) {
    const double doubled_area = (b - a).cross(c - a).norm();
    const double scale = std::max({(b - a).squaredNorm(), (c - a).squaredNorm(), (c - b).squaredNorm()});
    if (!(doubled_area > 1e-14 * scale) || !std::isfinite(doubled_area)) {
        std::ostringstream msg;
        msg << "zero-area triangle (" << tri[0] << ", " << tri[1] << ", " << tri[2] << ")";
        throw DegenerateGeometry(msg.str());
    }
}

Vec3 safe_normalized(const Vec3& v) {
    const double n = v.norm();
    return n > 0.0 ? Vec3(v / n) : Vec3::Zero();
}

} // namespace

// ---------------------------------------------------------------------------

double BoundaryGeometry::length() const { return std::accumulate(weight.begin(), weight.end(), 0.0); }

double BoundaryGeometry::integrated_kappa_n() const {
    double s = 0.0;
    for (std::size_t i = 0; i < weight.size(); ++i) s += weight[i] * kappa_n[i];
    return s;
}

double BoundaryGeometry::integrated_abs_kappa_n() const {
    double s = 0.0;
    for (std::size_t i = 0; i < weight.size(); ++i) s += weight[i] * std::abs(kappa_n[i]);
    return s;
}

double BoundaryGeometry::mean_abs_kappa_n() const { return integrated_abs_kappa_n() / length(); }

double BoundaryGeometry::integrated_kappa_g() const {
    double s = 0.0;
    for (std::size_t i = 0; i < weight.size(); ++i) s += weight[i] * kappa_g[i];
    return s;
}

double BoundaryGeometry::max_abs_kappa_n() const {
    double m = 0.0;
    for (double k : kappa_n) m = std::max(m, std::abs(k));
    return m;
}

std::vector<Vec3> vertex_normals(const TriMesh& mesh, const Configuration& x) {
    std::vector<Vec3> normals(static_cast<std::size_t>(mesh.vertex_count()), Vec3::Zero());
    for (const auto& tri : mesh.triangles()) {
        const Vec3 a = x.col(tri[0]);
        const Vec3 b = x.col(tri[1]);
        const Vec3 c = x.col(tri[2]);
        require_nondegenerate(a, b, c, tri);
        const Vec3 face = (b - a).cross(c - a).normalized();
        normals[tri[0]] += angle_between(b - a, c - a) * face;
        normals[tri[1]] += angle_between(c - b, a - b) * face;
        normals[tri[2]] += angle_between(a - c, b - c) * face;
    }
    for (auto& n : normals) n = safe_normalized(n);
    return normals;
}

BoundaryGeometry boundary_geometry(const TriMesh& mesh, const Configuration& x) {
    const auto& loop = mesh.boundary_loop();
    const std::size_t n = loop.size();
    if (n < 3) throw DegenerateGeometry("boundary loop has fewer than 3 vertices");

    const std::vector<Vec3> normals = vertex_normals(mesh, x);
    const double length_scale = [&] {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += (x.col(loop[(i + 1) % n]) - x.col(loop[i])).norm();
        return total;
    }();

    std::vector<Vec3> tangent(n);
    std::vector<double> edge(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 e = x.col(loop[(i + 1) % n]) - x.col(loop[i]);
        edge[i] = e.norm();
        if (!(edge[i] >= 1e-12 * length_scale)) throw DegenerateGeometry("collapsed boundary edge");
        tangent[i] = e / edge[i];
    }

    BoundaryGeometry bg;
    bg.vertex = loop;
    bg.weight.resize(n);
    bg.kappa.resize(n);
    bg.kappa_n.resize(n);
    bg.kappa_g.resize(n);
    bg.normal.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t prev = (i + n - 1) % n;
        const double w = 0.5 * (edge[i] + edge[prev]);
        const Vec3 curvature = (tangent[i] - tangent[prev]) / w;
        const Vec3 t_avg = safe_normalized(tangent[i] + tangent[prev]);
        // Orthonormal frame {t, N, N x t}; curvature is exactly orthogonal to t_avg.
        Vec3 normal = normals[loop[i]] - normals[loop[i]].dot(t_avg) * t_avg;
        if (normal.norm() < 1e-12) throw DegenerateGeometry("surface normal parallel to the boundary tangent");
        normal.normalize();
        const Vec3 inward = normal.cross(t_avg);
        bg.weight[i] = w;
        bg.kappa[i] = curvature.norm();
        bg.kappa_n[i] = curvature.dot(normal);
        bg.kappa_g[i] = curvature.dot(inward);
        bg.normal[i] = normal;
    }
    return bg;
}

// ---------------------------------------------------------------------------

AngleDefects gaussian_curvature(const TriMesh& mesh, const Configuration& x) {
    const auto nv = static_cast<std::size_t>(mesh.vertex_count());
    std::vector<double> angle_sum(nv, 0.0);
    AngleDefects out;
    out.area.assign(nv, 0.0);
    for (const auto& tri : mesh.triangles()) {
        const Vec3 a = x.col(tri[0]);
        const Vec3 b = x.col(tri[1]);
        const Vec3 c = x.col(tri[2]);
        require_nondegenerate(a, b, c, tri);
        const double area = 0.5 * (b - a).cross(c - a).norm();
        angle_sum[tri[0]] += angle_between(b - a, c - a);
        angle_sum[tri[1]] += angle_between(c - b, a - b);
        angle_sum[tri[2]] += angle_between(a - c, b - c);
        for (int v : tri) out.area[v] += area / 3.0;
        out.total_area += area;
    }
    const auto& boundary = mesh.is_boundary_vertex();
    out.defect.resize(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        if (boundary[v]) {
            out.defect[v] = kPi - angle_sum[v];
            out.total_turning += out.defect[v];
        } else {
            out.defect[v] = 2.0 * kPi - angle_sum[v];
            out.integrated_gaussian += out.defect[v];
        }
    }
    return out;
}

double gauss_bonnet_defect(const TriMesh& mesh, const Configuration& x) {
    const AngleDefects d = gaussian_curvature(mesh, x);
    return std::abs(d.integrated_gaussian + d.total_turning - 2.0 * kPi);
}

// ---------------------------------------------------------------------------

std::vector<double> cyclic_derivative(std::span<const double> f, double step, int order, DerivativeScheme scheme) {
    const std::size_t n = f.size();
    if (n < 5) throw std::invalid_argument("cyclic_derivative needs at least 5 samples");
    if (order < 1 || order > 3) throw std::invalid_argument("cyclic_derivative supports orders 1-3");
    std::vector<double> out(n);
    auto at = [&](std::ptrdiff_t i) {
        const auto m = static_cast<std::ptrdiff_t>(n);
        return f[static_cast<std::size_t>(((i % m) + m) % m)];
    };

    if (scheme == DerivativeScheme::central2) {
        for (std::size_t k = 0; k < n; ++k) {
            const auto i = static_cast<std::ptrdiff_t>(k);
            switch (order) {
            case 1: out[k] = (at(i + 1) - at(i - 1)) / (2.0 * step); break;
            case 2: out[k] = (at(i + 1) - 2.0 * at(i) + at(i - 1)) / (step * step); break;
            default:
                out[k] = (at(i + 2) - 2.0 * at(i + 1) + 2.0 * at(i - 1) - at(i - 2)) / (2.0 * step * step * step);
            }
        }
        return out;
    }

    // Trigonometric interpolation: differentiate the discrete Fourier series.
    // Wavenumbers are in units of 2 pi / (n step).
    const double base = 2.0 * kPi / (static_cast<double>(n) * step);
    std::vector<double> re(n / 2 + 1, 0.0);
    std::vector<double> im(n / 2 + 1, 0.0);
    std::vector<double> cos_table(n);
    std::vector<double> sin_table(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double theta = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
        cos_table[j] = std::cos(theta);
        sin_table[j] = std::sin(theta);
    }
    // The mean carries no derivative; removing it keeps constants exact under rounding.
    double mean = 0.0;
    for (const double v : f) mean += v;
    mean /= static_cast<double>(n);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        double a = 0.0;
        double b = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t idx = (j * k) % n;
            a += (f[j] - mean) * cos_table[idx];
            b -= (f[j] - mean) * sin_table[idx];
        }
        re[k] = a;
        im[k] = b;
    }
    // Multiply by (i w)^order.
    for (std::size_t k = 0; k <= n / 2; ++k) {
        const double w = base * static_cast<double>(k);
        double r = re[k];
        double s = im[k];
        for (int o = 0; o < order; ++o) {
            const double nr = -w * s;
            const double ns = w * r;
            r = nr;
            s = ns;
        }
        if (n % 2 == 0 && k == n / 2 && order % 2 == 1) r = s = 0.0;
        re[k] = r;
        im[k] = s;
    }
    for (std::size_t j = 0; j < n; ++j) {
        double v = re[0];
        for (std::size_t k = 1; k <= n / 2; ++k) {
            const std::size_t idx = (j * k) % n;
            const double factor = (n % 2 == 0 && k == n / 2) ? 1.0 : 2.0;
            v += factor * (re[k] * cos_table[idx] - im[k] * sin_table[idx]);
        }
        out[j] = v / static_cast<double>(n);
    }
    return out;
}

bool FrenetFrames::torsion_defined(std::size_t i) const { return std::isfinite(tau[i]); }

FrenetFrames frenet_analyze(const CurveSamples& samples, DerivativeScheme scheme) {
    const std::size_t n = samples.points.size();
    if (n < 5) throw std::invalid_argument("frenet_analyze needs at least 5 samples");

    FrenetFrames fr;
    fr.scheme = scheme;
    fr.parameter_step = 2.0 * kPi / static_cast<double>(n);

    std::array<std::vector<double>, 3> coord;
    for (int c = 0; c < 3; ++c) {
        coord[c].resize(n);
        for (std::size_t i = 0; i < n; ++i) coord[c][i] = samples.points[i][c];
    }
    std::array<std::array<std::vector<double>, 3>, 3> d;  // d[order-1][component]
    for (int o = 0; o < 3; ++o) {
        for (int c = 0; c < 3; ++c) d[o][c] = cyclic_derivative(coord[c], fr.parameter_step, o + 1, scheme);
    }

    fr.speed.resize(n);
    fr.kappa.resize(n);
    fr.tau.resize(n);
    fr.tangent.resize(n);
    fr.normal.resize(n);
    fr.binormal.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 r1(d[0][0][i], d[0][1][i], d[0][2][i]);
        const Vec3 r2(d[1][0][i], d[1][1][i], d[1][2][i]);
        const Vec3 r3(d[2][0][i], d[2][1][i], d[2][2][i]);
        const double speed = r1.norm();
        if (!(speed > 0.0)) throw DegenerateGeometry("curve has a stationary point");
        const Vec3 cross = r1.cross(r2);
        fr.speed[i] = speed;
        fr.kappa[i] = cross.norm() / (speed * speed * speed);
        fr.tangent[i] = r1 / speed;
        fr.binormal[i] = safe_normalized(cross);
        fr.normal[i] = fr.binormal[i].cross(fr.tangent[i]);
        fr.tau[i] = cross.dot(r3) / cross.squaredNorm();
    }
    fr.length = std::accumulate(fr.speed.begin(), fr.speed.end(), 0.0) * fr.parameter_step;
    const double kappa_floor = 1e-10 / fr.length;
    for (std::size_t i = 0; i < n; ++i) {
        if (fr.kappa[i] < kappa_floor) fr.tau[i] = std::numeric_limits<double>::quiet_NaN();
    }
    fr.arclength.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        fr.arclength[i] = fr.arclength[i - 1] + 0.5 * (fr.speed[i - 1] + fr.speed[i]) * fr.parameter_step;
    }
    return fr;
}

double ElResiduals::max_abs() const {
    double m = 0.0;
    for (double v : normal) m = std::max(m, std::abs(v));
    for (double v : binormal) m = std::max(m, std::abs(v));
    return m;
}

ElResiduals el_residuals(const FrenetFrames& curve, std::span<const double> contact_angle, double alpha,
                         double sigma, double beta) {
    const std::size_t n = curve.kappa.size();
    if (contact_angle.size() != n) throw std::invalid_argument("contact angle must have one value per sample");
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    const double kappa_floor = 1e-10 / curve.length;
    for (std::size_t i = 0; i < n; ++i) {
        if (curve.kappa[i] < kappa_floor || !std::isfinite(curve.tau[i])) {
            std::ostringstream msg;
            msg << "inflection point at s = " << curve.arclength[i] << ": normal vector undefined";
            throw DegenerateGeometry(msg.str());
        }
    }
    // Between samples kappa can pass through zero without any sample falling below the
    // floor; the principal normal then flips.
    if (curve.normal.size() == n) {
        for (std::size_t i = 0; i < n; ++i) {
            if (curve.normal[i].dot(curve.normal[(i + 1) % n]) < 0.0) {
                std::ostringstream msg;
                msg << "inflection point near s = " << curve.arclength[i] << ": principal normal flips";
                throw DegenerateGeometry(msg.str());
            }
        }
    }

    // d/ds = (1/speed) d/du
    auto d_ds = [&](const std::vector<double>& f) {
        std::vector<double> df = cyclic_derivative(f, curve.parameter_step, 1, curve.scheme);
        for (std::size_t i = 0; i < n; ++i) df[i] /= curve.speed[i];
        return df;
    };
    const std::vector<double> dk = d_ds(curve.kappa);
    const std::vector<double> ddk = d_ds(dk);
    const std::vector<double> dtau = d_ds(curve.tau);

    ElResiduals res;
    res.normal.resize(n);
    res.binormal.resize(n);
    const double tension = sigma / (2.0 * alpha);
    for (std::size_t i = 0; i < n; ++i) {
        const double k = curve.kappa[i];
        const double t = curve.tau[i];
        res.normal[i] = ddk[i] + 0.5 * k * k * k - (t * t + beta / (2.0 * alpha)) * k -
                        tension * std::sin(contact_angle[i]);
        res.binormal[i] = 2.0 * dk[i] * t + k * dtau[i] + tension * std::cos(contact_angle[i]);
    }
    return res;
}

// ---------------------------------------------------------------------------

double planarity(const Configuration& x, const TriMesh& mesh) {
    const Vec3 mean = x.rowwise().mean();
    const Eigen::Matrix3Xd centered = x.colwise() - mean;
    const Eigen::Matrix3d cov = centered * centered.transpose() / static_cast<double>(x.cols());
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov, Eigen::EigenvaluesOnly);
    const double rms = std::sqrt(std::max(0.0, eig.eigenvalues()(0)));
    return rms / (boundary_length(mesh, x) / (2.0 * kPi));
}

std::vector<MeanCurvatureSample> mean_curvature_diagnostic(const TriMesh& mesh, const Configuration& x) {
    const auto nv = static_cast<std::size_t>(mesh.vertex_count());
    std::vector<Vec3> laplacian(nv, Vec3::Zero());
    std::vector<double> mixed_area(nv, 0.0);
    for (const auto& tri : mesh.triangles()) {
        const std::array<Vec3, 3> p{x.col(tri[0]), x.col(tri[1]), x.col(tri[2])};
        require_nondegenerate(p[0], p[1], p[2], tri);
        const double area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]).norm();
        std::array<double, 3> cot{};
        bool obtuse = false;
        int obtuse_corner = -1;
        for (int c = 0; c < 3; ++c) {
            const Vec3 u = p[(c + 1) % 3] - p[c];
            const Vec3 v = p[(c + 2) % 3] - p[c];
            cot[c] = u.dot(v) / u.cross(v).norm();
            if (u.dot(v) < 0.0) {
                obtuse = true;
                obtuse_corner = c;
            }
        }
        for (int c = 0; c < 3; ++c) {
            const int i = tri[c];
            // Edge (i, j) is opposite corner k; edge (i, k) is opposite corner j.
            const double w_ij = cot[(c + 2) % 3];
            const double w_ik = cot[(c + 1) % 3];
            laplacian[i] += w_ij * (p[c] - p[(c + 1) % 3]) + w_ik * (p[c] - p[(c + 2) % 3]);
            if (!obtuse) {
                mixed_area[i] += 0.125 * (w_ij * (p[c] - p[(c + 1) % 3]).squaredNorm() +
                                          w_ik * (p[c] - p[(c + 2) % 3]).squaredNorm());
            } else {
                mixed_area[i] += (obtuse_corner == c ? 0.5 : 0.25) * area;
            }
        }
    }
    const std::vector<Vec3> normals = vertex_normals(mesh, x);
    std::vector<MeanCurvatureSample> out;
    const auto& boundary = mesh.is_boundary_vertex();
    for (std::size_t v = 0; v < nv; ++v) {
        if (boundary[v]) continue;
        // (1 / 2A) sum (cot a + cot b)(x_i - x_j) = 2 H N
        const Vec3 hn = laplacian[v] / (2.0 * mixed_area[v]);
        out.push_back({static_cast<int>(v), 0.5 * hn.dot(normals[v])});
    }
    return out;
}

// Relative amplitude below which a boundary mode is lattice or rounding noise.
constexpr double kModeThreshold = 1e-3;

BoundaryModes boundary_modes(const TriMesh& mesh, const Configuration& x, int max_mode, int resample) {
    const auto& loop = mesh.boundary_loop();
    const std::size_t n = loop.size();
    if (n < 3) throw DegenerateGeometry("boundary loop has fewer than 3 vertices");
    if (max_mode < 2 || resample < 2 * max_mode + 1) throw std::invalid_argument("boundary_modes: bad resolution");

    // Arclength-weighted centroid of the boundary polygon.
    std::vector<double> cumulative(n + 1, 0.0);
    Vec3 centroid = Vec3::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 a = x.col(loop[i]);
        const Vec3 b = x.col(loop[(i + 1) % n]);
        const double len = (b - a).norm();
        cumulative[i + 1] = cumulative[i] + len;
        centroid += 0.5 * len * (a + b);
    }
    const double total = cumulative[n];
    if (!(total > 0.0)) throw DegenerateGeometry("boundary has zero length");
    centroid /= total;

    std::vector<double> radius(static_cast<std::size_t>(resample));
    std::size_t seg = 0;
    for (int j = 0; j < resample; ++j) {
        const double s = total * j / resample;
        while (seg + 1 < n && cumulative[seg + 1] <= s) ++seg;
        const double len = cumulative[seg + 1] - cumulative[seg];
        const double f = len > 0.0 ? (s - cumulative[seg]) / len : 0.0;
        const Vec3 p = (1.0 - f) * x.col(loop[seg]) + f * x.col(loop[(seg + 1) % n]);
        radius[static_cast<std::size_t>(j)] = (p - centroid).norm();
    }

    BoundaryModes out;
    out.amplitude.assign(static_cast<std::size_t>(max_mode) + 1, 0.0);
    for (int k = 0; k <= max_mode; ++k) {
        double a = 0.0;
        double b = 0.0;
        for (int j = 0; j < resample; ++j) {
            const double theta = 2.0 * kPi * k * j / resample;
            a += radius[static_cast<std::size_t>(j)] * std::cos(theta);
            b += radius[static_cast<std::size_t>(j)] * std::sin(theta);
        }
        const double scale = k == 0 ? 1.0 / resample : 2.0 / resample;
        out.amplitude[static_cast<std::size_t>(k)] = scale * std::hypot(a, b);
    }
    out.mean_radius = out.amplitude[0];
    double best = kModeThreshold * out.mean_radius;
    for (int k = 2; k <= max_mode; ++k) {
        if (out.amplitude[static_cast<std::size_t>(k)] > best) {
            best = out.amplitude[static_cast<std::size_t>(k)];
            out.dominant_mode = k;
        }
    }
    return out;
}

namespace {

bool segment_hits_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 dir = q - p;
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 h = dir.cross(e2);
    const double det = e1.dot(h);
    if (std::abs(det) < 1e-300) return false;
    const double inv = 1.0 / det;
    const Vec3 s = p - a;
    const double u = inv * s.dot(h);
    if (u < 0.0 || u > 1.0) return false;
    const Vec3 qv = s.cross(e1);
    const double v = inv * dir.dot(qv);
    if (v < 0.0 || u + v > 1.0) return false;
    const double t = inv * e2.dot(qv);
    return t >= 0.0 && t <= 1.0;
}

} // namespace

int count_self_intersections(const TriMesh& mesh, const Configuration& x) {
    const auto& tris = mesh.triangles();
    const std::size_t nf = tris.size();
    std::vector<Eigen::AlignedBox3d> boxes(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        for (int v : tris[f]) boxes[f].extend(Vec3(x.col(v)));
    }
    int count = 0;
    for (std::size_t f = 0; f < nf; ++f) {
        const auto& A = tris[f];
        for (std::size_t g = f + 1; g < nf; ++g) {
            const auto& B = tris[g];
            if (!boxes[f].intersects(boxes[g])) continue;
            bool shares = false;
            for (int a : A) {
                for (int b : B) shares = shares || a == b;
            }
            if (shares) continue;
            bool hit = false;
            for (int c = 0; c < 3 && !hit; ++c) {
                hit = segment_hits_triangle(x.col(A[c]), x.col(A[(c + 1) % 3]), x.col(B[0]), x.col(B[1]),
                                            x.col(B[2])) ||
                      segment_hits_triangle(x.col(B[c]), x.col(B[(c + 1) % 3]), x.col(A[0]), x.col(A[1]),
                                            x.col(A[2]));
            }
            if (hit) ++count;
        }
    }
    return count;
}

} // namespace eplateau

#include "eplateau/asymptotic.hpp"

#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace eplateau {

namespace {

constexpr double kPi = std::numbers::pi;

struct Derivatives {
    Vec3 x_r, x_phi, x_rr, x_rphi, x_phiphi;
};

Derivatives derivatives(const SaddleFamily& fam, double r, double phi) {
    const double t = fam.t;
    const double a = 1.0 + t * t;
    const double b = 1.0 - t * t;
    const double c = std::cos(phi), s = std::sin(phi);
    const double c2 = std::cos(2.0 * phi), s2 = std::sin(2.0 * phi);
    const double q = t / fam.radius;
    Derivatives d;
    d.x_r = Vec3(a * c, b * s, 2.0 * q * r * s2);
    d.x_phi = Vec3(-r * a * s, r * b * c, 2.0 * q * r * r * c2);
    d.x_rr = Vec3(0.0, 0.0, 2.0 * q * s2);
    d.x_rphi = Vec3(-a * s, b * c, 4.0 * q * r * c2);
    d.x_phiphi = Vec3(-r * a * c, -r * b * s, -4.0 * q * r * r * s2);
    return d;
}

struct GaussRule {
    std::vector<double> node;    // on [-1, 1]
    std::vector<double> weight;
};

GaussRule gauss_legendre(int n) {
    GaussRule rule;
    rule.node.resize(static_cast<std::size_t>(n));
    rule.weight.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.node[static_cast<std::size_t>(i)] = x;
        rule.weight[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

constexpr int kGaussOrder = 12;

// Integral over r in [0, R], phi in [0, 2 pi) of f(r, phi).
template <typename F>
double surface_integral(const SaddleFamily& fam, int angular_nodes, int radial_panels, F&& f) {
    static const GaussRule rule = gauss_legendre(kGaussOrder);
    const double h_phi = 2.0 * kPi / angular_nodes;
    const double h_r = fam.radius / radial_panels;
    double total = 0.0;
    for (int j = 0; j < angular_nodes; ++j) {
        const double phi = j * h_phi;
        double column = 0.0;
        for (int p = 0; p < radial_panels; ++p) {
            for (int g = 0; g < kGaussOrder; ++g) {
                const double r = h_r * (p + 0.5 * (rule.node[g] + 1.0));
                column += 0.5 * h_r * rule.weight[g] * f(r, phi);
            }
        }
        total += column;
    }
    return total * h_phi;
}

template <typename F>
double boundary_integral(int angular_nodes, F&& f) {
    const double h = 2.0 * kPi / angular_nodes;
    double total = 0.0;
    for (int j = 0; j < angular_nodes; ++j) total += f(j * h);
    return total * h;
}

void check_options(const QuadratureOptions& opt) {
    if (opt.angular_nodes < 64 || opt.radial_panels < 1 || !(opt.tolerance > 0.0)) {
        throw std::invalid_argument("quadrature needs >= 64 angular nodes, >= 1 radial panel, tolerance > 0");
    }
}

void require_converged(const char* what, double fine, double coarse, double tolerance) {
    const double err = std::abs(fine - coarse);
    if (err > tolerance * std::max(1.0, std::abs(fine))) {
        std::ostringstream msg;
        msg << what << ": quadrature not converged, estimated error " << err;
        throw NumericalFailure(msg.str());
    }
}

// Fine and half-resolution quadrature of a surface integrand.
template <typename F>
SeriesComparison surface_quadrature(const char* what, const SaddleFamily& fam, const QuadratureOptions& opt, F&& f) {
    check_options(opt);
    SeriesComparison out;
    out.quadrature = surface_integral(fam, opt.angular_nodes, opt.radial_panels, f);
    const double coarse =
        surface_integral(fam, opt.angular_nodes / 2, std::max(1, opt.radial_panels / 2), f);
    out.error_estimate = std::abs(out.quadrature - coarse);
    require_converged(what, out.quadrature, coarse, opt.tolerance);
    return out;
}

// Periodic trapezoid refined by doubling until successive values agree.
template <typename F>
SeriesComparison adaptive_boundary(const char* what, const QuadratureOptions& opt, F&& f) {
    check_options(opt);
    int n = opt.angular_nodes;
    double previous = boundary_integral(n, f);
    for (int round = 0; round < 8; ++round) {
        n *= 2;
        const double current = boundary_integral(n, f);
        const double err = std::abs(current - previous);
        if (err <= opt.tolerance * std::max(1.0, std::abs(current))) {
            SeriesComparison out;
            out.quadrature = current;
            out.error_estimate = err;
            return out;
        }
        previous = current;
    }
    require_converged(what, previous, boundary_integral(n / 2, f), opt.tolerance);
    return {};
}

double area_element(const SaddleFamily& fam, double r, double phi) {
    const Derivatives d = derivatives(fam, r, phi);
    return d.x_r.cross(d.x_phi).norm();
}

double bending_density(const SaddleFamily& fam, double phi) {
    const Derivatives d = derivatives(fam, fam.radius, phi);
    const double speed = d.x_phi.norm();
    return d.x_phi.cross(d.x_phiphi).squaredNorm() / std::pow(speed, 5);
}

} // namespace

Vec3 family_point(const SaddleFamily& fam, double r, double phi) {
    const double t2 = fam.t * fam.t;
    return {r * (1.0 + t2) * std::cos(phi), r * (1.0 - t2) * std::sin(phi),
            fam.t * (r * r / fam.radius) * std::sin(2.0 * phi)};
}

Metric family_metric(const SaddleFamily& fam, double r, double phi) {
    const double t2 = fam.t * fam.t;
    const double rho2 = (r / fam.radius) * (r / fam.radius);
    const double c2 = std::cos(2.0 * phi), c4 = std::cos(4.0 * phi);
    const double s2 = std::sin(2.0 * phi), s4 = std::sin(4.0 * phi);
    Metric g;
    g.g_rr = t2 * t2 + 2.0 * t2 * (rho2 + c2 - rho2 * c4) + 1.0;
    g.g_rphi = 2.0 * r * t2 * (rho2 * s4 - s2);
    g.g_phiphi = r * r * (t2 * t2 + 2.0 * t2 * (rho2 - c2 + rho2 * c4) + 1.0);
    return g;
}

double family_gaussian_K(const SaddleFamily& fam) {
    const double q = 2.0 * fam.t / fam.radius;
    return -q * q;
}

SeriesComparison family_length(const SaddleFamily& fam, const QuadratureOptions& opt) {
    SeriesComparison out = adaptive_boundary("family_length", opt, [&](double phi) {
        return derivatives(fam, fam.radius, phi).x_phi.norm();
    });
    const double t2 = fam.t * fam.t;
    out.series = kPi * fam.radius * (2.0 + 2.0 * t2 - t2 * t2);
    return out;
}

double family_area(const SaddleFamily& fam, const QuadratureOptions& opt) {
    return surface_quadrature("family_area", fam, opt,
                              [&](double r, double phi) { return area_element(fam, r, phi); })
        .quadrature;
}

SeriesComparison family_energy(const SaddleFamily& fam, double sigma, double alpha, const QuadratureOptions& opt) {
    const SeriesComparison area =
        surface_quadrature("family_energy", fam, opt, [&](double r, double phi) { return area_element(fam, r, phi); });
    const SeriesComparison bending =
        adaptive_boundary("family_energy", opt, [&](double phi) { return bending_density(fam, phi); });

    SeriesComparison out;
    out.quadrature = sigma * area.quadrature + alpha * bending.quadrature;
    out.error_estimate = sigma * area.error_estimate + alpha * bending.error_estimate;
    const double s = sigma * fam.radius * fam.radius * fam.radius / alpha;
    const double t2 = fam.t * fam.t;
    out.series = (kPi * alpha / fam.radius) *
                 (2.0 + s + t2 * (10.0 + s) - t2 * t2 * (9.0 + 5.0 * s / 3.0));
    return out;
}

BoundaryCurvatures family_boundary_curvatures(const SaddleFamily& fam, double phi) {
    const double t = fam.t;
    const double t2 = t * t;
    const double R = fam.radius;
    BoundaryCurvatures k;
    k.kappa_n = -(2.0 * t / R) * std::sin(2.0 * phi) +
                (2.0 * t * t2 / R) * (3.0 * std::sin(2.0 * phi) - std::sin(4.0 * phi) + std::sin(6.0 * phi));
    k.kappa_g = 1.0 / R + t2 * (1.0 + 3.0 * std::cos(2.0 * phi) - 5.0 * std::cos(4.0 * phi)) / R;
    return k;
}

Vec3 family_boundary_normal(const SaddleFamily& fam, double phi) {
    const Derivatives d = derivatives(fam, fam.radius, phi);
    return d.x_r.cross(d.x_phi).normalized();
}

BoundaryCurvatures family_boundary_curvatures_exact(const SaddleFamily& fam, double phi) {
    const Derivatives d = derivatives(fam, fam.radius, phi);
    const Vec3 n = d.x_r.cross(d.x_phi).normalized();
    const double speed = d.x_phi.norm();
    BoundaryCurvatures k;
    k.kappa_n = d.x_phiphi.dot(n) / (speed * speed);
    k.kappa_g = d.x_phiphi.dot(n.cross(d.x_phi)) / (speed * speed * speed);
    return k;
}

BoundaryAverages family_boundary_averages(const SaddleFamily& fam, int angular_nodes) {
    if (angular_nodes < 64) throw std::invalid_argument("family_boundary_averages: need >= 64 nodes");
    BoundaryAverages avg;
    double length = 0.0;
    const double h = 2.0 * kPi / angular_nodes;
    for (int j = 0; j < angular_nodes; ++j) {
        const double phi = j * h;
        const double ds = derivatives(fam, fam.radius, phi).x_phi.norm() * h;
        const BoundaryCurvatures k = family_boundary_curvatures_exact(fam, phi);
        length += ds;
        avg.integrated_abs_kappa_n += std::abs(k.kappa_n) * ds;
        avg.integrated_kappa_g += k.kappa_g * ds;
    }
    avg.mean_abs_kappa_n = avg.integrated_abs_kappa_n / length;
    return avg;
}

GaussianCurvatureIntegral family_integrated_K(const SaddleFamily& fam, const QuadratureOptions& opt) {
    GaussianCurvatureIntegral out;
    out.direct = surface_quadrature("family_integrated_K", fam, opt, [&](double r, double phi) {
                     const Derivatives d = derivatives(fam, r, phi);
                     const Vec3 cross = d.x_r.cross(d.x_phi);
                     const double jac = cross.norm();
                     const Vec3 n = cross / jac;
                     const double l = d.x_rr.dot(n), m = d.x_rphi.dot(n), nn = d.x_phiphi.dot(n);
                     // K dA = (L N - M^2) / det g * sqrt(det g)
                     return (l * nn - m * m) / jac;
                 }).quadrature;
    const SeriesComparison turning = adaptive_boundary("family_integrated_K", opt, [&](double phi) {
        return family_boundary_curvatures_exact(fam, phi).kappa_g *
               derivatives(fam, fam.radius, phi).x_phi.norm();
    });
    out.gauss_bonnet = 2.0 * kPi - turning.quadrature;
    out.leading_order = -4.0 * kPi * fam.t * fam.t;
    return out;
}

double pitchfork_amplitude(double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("pitchfork_amplitude: gamma must be positive");
    const double gs = gamma_star();
    if (gamma <= gs) return 0.0;
    return std::sqrt(3.0 * (gamma - gs) / (2.0 * gamma));
}

double exact_radius(double t, double length, const QuadratureOptions& opt) {
    if (!(length > 0.0)) throw std::invalid_argument("exact_radius: length must be positive");
    return length / family_length({1.0, t}, opt).quadrature;
}

DiskMesh family_mesh(const SaddleFamily& fam, int rings, int segments) {
    if (rings < 1 || segments < 3) throw std::invalid_argument("family_mesh: need rings >= 1, segments >= 3");
    const int n = 1 + rings * segments;
    auto index = [&](int ring, int j) { return 1 + (ring - 1) * segments + (j % segments); };

    Configuration x(3, n);
    x.col(0) = family_point(fam, 0.0, 0.0);
    for (int i = 1; i <= rings; ++i) {
        const double r = fam.radius * i / rings;
        for (int j = 0; j < segments; ++j) {
            x.col(index(i, j)) = family_point(fam, r, 2.0 * kPi * j / segments);
        }
    }

    std::vector<Triangle> triangles;
    for (int j = 0; j < segments; ++j) triangles.push_back({0, index(1, j), index(1, j + 1)});
    for (int i = 1; i < rings; ++i) {
        for (int j = 0; j < segments; ++j) {
            const int a = index(i, j), b = index(i, j + 1), c = index(i + 1, j), d = index(i + 1, j + 1);
            triangles.push_back({a, c, d});
            triangles.push_back({a, d, b});
        }
    }
    return {TriMesh::from_triangles(n, std::move(triangles)), std::move(x)};
}

} // namespace eplateau

#pragma once

#include "eplateau/mesh.hpp"
#include "eplateau/types.hpp"

#include <numbers>

namespace eplateau {

/// Twisted-saddle trial surface over the polar disk r in [0, R]:
///   x = r (1 + t^2) cos phi,  y = r (1 - t^2) sin phi,  z = t (r^2 / R) sin 2 phi.
/// t = 0 is the flat disk of radius R, t = +-1 a flat figure-eight; t -> -t mirrors.
struct SaddleFamily {
    double radius = 1.0;
    double t = 0.0;
};

struct Metric {
    double g_rr = 0.0;
    double g_rphi = 0.0;
    double g_phiphi = 0.0;

    [[nodiscard]] double det() const { return g_rr * g_phiphi - g_rphi * g_rphi; }
};

[[nodiscard]] Vec3 family_point(const SaddleFamily& fam, double r, double phi);

/// Closed-form first fundamental form in (r, phi).
[[nodiscard]] Metric family_metric(const SaddleFamily& fam, double r, double phi);

/// Leading-order Gaussian curvature, -(2t/R)^2.
[[nodiscard]] double family_gaussian_K(const SaddleFamily& fam);

struct QuadratureOptions {
    int angular_nodes = 256;      // trapezoid nodes in phi; at least 64
    int radial_panels = 8;        // Gauss-Legendre panels in r
    double tolerance = 1e-12;     // relative; checked by halving the resolution
};

/// A quantity evaluated by quadrature on the exact embedding next to its truncated series.
struct SeriesComparison {
    double quadrature = 0.0;
    double series = 0.0;
    double error_estimate = 0.0;  // |fine - coarse| of the quadrature

    [[nodiscard]] double residual() const { return quadrature - series; }
};

/// Boundary length; series pi R (2 + 2 t^2 - t^4).
[[nodiscard]] SeriesComparison family_length(const SaddleFamily& fam, const QuadratureOptions& opt = {});

/// sigma * area + alpha * closed integral of kappa^2 ds; series
/// (pi alpha / R) [2 + s + t^2 (10 + s) - t^4 (9 + 5 s / 3)] with s = sigma R^3 / alpha.
[[nodiscard]] SeriesComparison family_energy(const SaddleFamily& fam, double sigma, double alpha,
                                             const QuadratureOptions& opt = {});

/// Film area alone, by the same quadrature.
[[nodiscard]] double family_area(const SaddleFamily& fam, const QuadratureOptions& opt = {});

struct BoundaryCurvatures {
    double kappa_n = 0.0;
    double kappa_g = 0.0;
};

/// Truncated series through t^3 (kappa_n) and t^2 (kappa_g).
[[nodiscard]] BoundaryCurvatures family_boundary_curvatures(const SaddleFamily& fam, double phi);

/// Normal and geodesic curvature of the boundary at phi from exact derivatives of the
/// embedding; kappa_g is measured along the inward co-normal.
[[nodiscard]] BoundaryCurvatures family_boundary_curvatures_exact(const SaddleFamily& fam, double phi);

/// Unit surface normal x_r x x_phi / |x_r x x_phi| on the boundary r = R.
[[nodiscard]] Vec3 family_boundary_normal(const SaddleFamily& fam, double phi);

struct BoundaryAverages {
    double mean_abs_kappa_n = 0.0;        // arclength average of |kappa_n|
    double integrated_abs_kappa_n = 0.0;  // closed integral of |kappa_n| ds
    double integrated_kappa_g = 0.0;
};

/// Exact-embedding boundary averages by trapezoid quadrature in phi.
[[nodiscard]] BoundaryAverages family_boundary_averages(const SaddleFamily& fam, int angular_nodes = 4096);

struct GaussianCurvatureIntegral {
    double direct = 0.0;          // integral of K dA with K from the second fundamental form
    double gauss_bonnet = 0.0;    // 2 pi - closed integral of kappa_g ds
    double leading_order = 0.0;   // -4 pi t^2
};

[[nodiscard]] GaussianCurvatureIntegral family_integrated_K(const SaddleFamily& fam,
                                                            const QuadratureOptions& opt = {});

/// 96 pi^3: onset of the pitchfork within the trial family.
[[nodiscard]] constexpr double gamma_star() {
    return 96.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi;
}

/// Nonnegative root of t (96 pi^3 - gamma) + (2/3) gamma t^3 = 0. Requires gamma > 0.
[[nodiscard]] double pitchfork_amplitude(double gamma);

/// Radius at which the series length equals `length`. The series is linear in R.
template <typename T>
[[nodiscard]] T series_radius(const T& t, double length) {
    const T t2 = t * t;
    return T(length) / (std::numbers::pi * (T(2.0) + T(2.0) * t2 - t2 * t2));
}

/// Series energy with R eliminated through the series length constraint, in units
/// where alpha = L = 1 and sigma = gamma. Generic in T so complex arguments work.
template <typename T>
[[nodiscard]] T constrained_series_energy(const T& t, double gamma) {
    const T r = series_radius(t, 1.0);
    const T s = T(gamma) * r * r * r;
    const T t2 = t * t;
    return (std::numbers::pi / r) *
           (T(2.0) + s + t2 * (T(10.0) + s) - t2 * t2 * (T(9.0) + T(5.0 / 3.0) * s));
}

/// Radius giving exact-embedding boundary length `length`. The embedding scales with R.
[[nodiscard]] double exact_radius(double t, double length, const QuadratureOptions& opt = {});

/// Polar-grid triangulation of the family: one center vertex plus `rings` circles of
/// `segments` vertices each; triangles counterclockwise in (r, phi).
[[nodiscard]] DiskMesh family_mesh(const SaddleFamily& fam, int rings, int segments);

} // namespace eplateau

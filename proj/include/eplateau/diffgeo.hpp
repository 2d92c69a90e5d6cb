#pragma once

#include "eplateau/mesh.hpp"
#include "eplateau/types.hpp"

#include <span>
#include <vector>

namespace eplateau {

// ---------------------------------------------------------------------------
// Boundary curvature decomposition
// ---------------------------------------------------------------------------

/// Per boundary vertex (in boundary-loop order) curvature decomposition.
/// kappa_n is measured along the surface normal, kappa_g along the inward
/// co-normal N x t, so a convex planar boundary has kappa_g > 0.
struct BoundaryGeometry {
    std::vector<int> vertex;
    std::vector<double> weight;  // <s_v>, half the two incident edge lengths
    std::vector<double> kappa;
    std::vector<double> kappa_n;
    std::vector<double> kappa_g;
    std::vector<Vec3> normal;

    [[nodiscard]] double length() const;
    [[nodiscard]] double integrated_kappa_n() const;      // sum <s_v> kappa_n (signed)
    [[nodiscard]] double integrated_abs_kappa_n() const;  // sum <s_v> |kappa_n|
    [[nodiscard]] double mean_abs_kappa_n() const;        // length-weighted average of |kappa_n|
    [[nodiscard]] double integrated_kappa_g() const;
    [[nodiscard]] double max_abs_kappa_n() const;
};

[[nodiscard]] BoundaryGeometry boundary_geometry(const TriMesh& mesh, const Configuration& x);

/// Angle-weighted average of incident face normals, normalized.
[[nodiscard]] std::vector<Vec3> vertex_normals(const TriMesh& mesh, const Configuration& x);

// ---------------------------------------------------------------------------
// Gaussian curvature
// ---------------------------------------------------------------------------

struct AngleDefects {
    std::vector<double> defect;  // interior: 2 pi - sum of angles; boundary: pi - sum (turning)
    std::vector<double> area;    // barycentric vertex area
    double integrated_gaussian = 0.0;  // sum of interior defects
    double total_turning = 0.0;        // sum of boundary turnings (discrete integral of kappa_g)
    double total_area = 0.0;

    [[nodiscard]] double mean_gaussian() const { return integrated_gaussian / total_area; }
};

[[nodiscard]] AngleDefects gaussian_curvature(const TriMesh& mesh, const Configuration& x);

/// |sum interior defects + sum boundary turnings - 2 pi|; zero up to rounding for any disk.
[[nodiscard]] double gauss_bonnet_defect(const TriMesh& mesh, const Configuration& x);

// ---------------------------------------------------------------------------
// Space curves
// ---------------------------------------------------------------------------

/// Closed curve sampled uniformly in some parameter; the last sample connects to the first.
struct CurveSamples {
    std::vector<Vec3> points;
};

enum class DerivativeScheme {
    central2,  // second-order cyclic central differences
    spectral,  // trigonometric interpolation
};

struct FrenetFrames {
    DerivativeScheme scheme = DerivativeScheme::central2;
    double parameter_step = 0.0;
    double length = 0.0;
    std::vector<double> arclength;  // s at each sample, s[0] = 0
    std::vector<double> speed;      // ds/du
    std::vector<double> kappa;
    std::vector<double> tau;        // NaN where kappa is too small for torsion to be defined
    std::vector<Vec3> tangent;
    std::vector<Vec3> normal;
    std::vector<Vec3> binormal;

    [[nodiscard]] bool torsion_defined(std::size_t i) const;
};

/// Curvature, torsion and Frenet frames by cyclic differentiation of the samples.
/// Requires at least 5 samples.
[[nodiscard]] FrenetFrames frenet_analyze(const CurveSamples& samples,
                                          DerivativeScheme scheme = DerivativeScheme::central2);

/// Cyclic derivative of uniformly spaced periodic samples.
[[nodiscard]] std::vector<double> cyclic_derivative(std::span<const double> f, double step, int order,
                                                    DerivativeScheme scheme);

struct ElResiduals {
    std::vector<double> normal;    // kappa'' + kappa^3/2 - (tau^2 + beta/2a) kappa - (sigma/2a) sin(theta)
    std::vector<double> binormal;  // 2 kappa' tau + kappa tau' + (sigma/2a) cos(theta)

    [[nodiscard]] double max_abs() const;
};

/// Euler-Lagrange residuals of the boundary equations. Throws DegenerateGeometry at an
/// inflection (kappa ~ 0), reporting its arclength.
[[nodiscard]] ElResiduals el_residuals(const FrenetFrames& curve, std::span<const double> contact_angle,
                                       double alpha, double sigma, double beta);

// ---------------------------------------------------------------------------
// Shape diagnostics
// ---------------------------------------------------------------------------

/// RMS distance of the vertices to their best-fit plane divided by (boundary length / 2 pi).
[[nodiscard]] double planarity(const Configuration& x, const TriMesh& mesh);

struct MeanCurvatureSample {
    int vertex = 0;
    double mean_curvature = 0.0;  // signed against the vertex normal
};

/// Cotangent-weight mean curvature with mixed Voronoi areas at interior vertices.
[[nodiscard]] std::vector<MeanCurvatureSample> mean_curvature_diagnostic(const TriMesh& mesh,
                                                                         const Configuration& x);

struct BoundaryModes {
    std::vector<double> amplitude;  // amplitude[k] of cos(k theta) in the radial profile, k = 0..max
    double mean_radius = 0.0;
    int dominant_mode = 0;  // argmax over k >= 2 of amplitude; 0 unless it exceeds 1e-3 mean_radius
};

/// Fourier analysis of the boundary's distance to its centroid, resampled
/// uniformly in arclength.
[[nodiscard]] BoundaryModes boundary_modes(const TriMesh& mesh, const Configuration& x, int max_mode = 16,
                                           int resample = 512);

/// Number of pairs of vertex-disjoint triangles that intersect.
[[nodiscard]] int count_self_intersections(const TriMesh& mesh, const Configuration& x);

} // namespace eplateau

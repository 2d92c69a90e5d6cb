#include "eplateau/asymptotic.hpp"
#include "eplateau/diffgeo.hpp"

#include "doctest.h"

#include <Eigen/Geometry>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace eplateau;

namespace {

constexpr double kPi = std::numbers::pi;

// Least-squares slope of log|y| against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(std::abs(y[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Taylor coefficient c_k of f about 0 by the trapezoid rule on |t| = rho.
template <typename F>
double taylor_coefficient(F&& f, int k, double rho, int nodes = 128) {
    std::complex<double> sum = 0.0;
    for (int j = 0; j < nodes; ++j) {
        const double theta = 2.0 * kPi * j / nodes;
        const std::complex<double> z = std::polar(rho, theta);
        sum += f(z) * std::polar(1.0, -k * theta);
    }
    return sum.real() / (nodes * std::pow(rho, k));
}

} // namespace

TEST_CASE("closed-form metric matches finite differences of the embedding") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double h = 1e-6;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const SaddleFamily fam{0.5 + u(rng), 0.5 * u(rng)};
        const double r = fam.radius * u(rng);
        const double phi = 2.0 * kPi * u(rng);
        const Vec3 xr = (family_point(fam, r + h, phi) - family_point(fam, r - h, phi)) / (2.0 * h);
        const Vec3 xp = (family_point(fam, r, phi + h) - family_point(fam, r, phi - h)) / (2.0 * h);
        const Metric g = family_metric(fam, r, phi);
        worst = std::max({worst, std::abs(g.g_rr - xr.dot(xr)), std::abs(g.g_rphi - xr.dot(xp)),
                          std::abs(g.g_phiphi - xp.dot(xp))});
    }
    MESSAGE("worst metric deviation " << worst);
    CHECK(worst < 1e-8);
}

TEST_CASE("trivial and figure-eight members") {
    const SaddleFamily flat{1.3, 0.0};
    for (const double phi : {0.0, 0.4, 2.0}) {
        const Vec3 p = family_point(flat, 0.7, phi);
        CHECK((p - Vec3(0.7 * std::cos(phi), 0.7 * std::sin(phi), 0.0)).norm() < 1e-15);
        const Metric g = family_metric(flat, 0.7, phi);
        CHECK(g.g_rr == doctest::Approx(1.0));
        CHECK(g.g_rphi == doctest::Approx(0.0));
        CHECK(g.g_phiphi == doctest::Approx(0.49));
    }
    const SaddleFamily eight{1.3, 1.0};
    for (int j = 0; j < 16; ++j) {
        const double phi = 2.0 * kPi * j / 16.0;
        const Vec3 p = family_point(eight, eight.radius, phi);
        CHECK(p.y() == 0.0);
        CHECK(p.x() == doctest::Approx(2.0 * eight.radius * std::cos(phi)));
        CHECK(p.z() == doctest::Approx(eight.radius * std::sin(2.0 * phi)));
    }
    CHECK(family_gaussian_K({2.0, 0.3}) == doctest::Approx(-0.09));
}

TEST_CASE("flat disk energy is exact") {
    const SaddleFamily fam{0.8, 0.0};
    const double sigma = 3.0, alpha = 0.5;
    const SeriesComparison e = family_energy(fam, sigma, alpha);
    const double exact = sigma * kPi * 0.64 + 2.0 * kPi * alpha / 0.8;
    CHECK(e.quadrature == doctest::Approx(exact).epsilon(1e-12));
    CHECK(e.series == doctest::Approx(exact).epsilon(1e-14));
    CHECK(family_length(fam).quadrature == doctest::Approx(1.6 * kPi).epsilon(1e-13));
    CHECK(family_area(fam) == doctest::Approx(kPi * 0.64).epsilon(1e-13));
}

TEST_CASE("length and energy series residuals scale as t^6") {
    const std::vector<double> ts{0.05, 0.1, 0.2, 0.3};
    std::vector<double> length_res, energy_res;
    for (const double t : ts) {
        const SaddleFamily fam{1.0, t};
        length_res.push_back(family_length(fam).residual());
        // sigma R^3 / alpha = 12 is the value at the pitchfork onset.
        energy_res.push_back(family_energy(fam, 12.0, 1.0).residual());
    }
    const double pl = log_log_slope(ts, length_res);
    const double pe = log_log_slope(ts, energy_res);
    MESSAGE("length slope " << pl << ", energy slope " << pe);
    CHECK(std::abs(pl - 6.0) < 0.3);
    CHECK(std::abs(pe - 6.0) < 0.3);
    const double c = length_res[1] / std::pow(0.1, 6.0);
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(std::abs(length_res[i]) <= 2.0 * std::abs(c) * std::pow(ts[i], 6.0));
}

TEST_CASE("boundary curvature series") {
    const SaddleFamily flat{2.0, 0.0};
    for (const double phi : {0.0, 1.0, 3.0}) {
        const BoundaryCurvatures k = family_boundary_curvatures(flat, phi);
        CHECK(k.kappa_n == 0.0);
        CHECK(k.kappa_g == doctest::Approx(0.5));
    }
    // Truncation orders: kappa_n through t^3, kappa_g through t^2.
    std::vector<double> ts{0.01, 0.02, 0.04}, n_res, g_res;
    for (const double t : ts) {
        double wn = 0.0, wg = 0.0;
        for (int j = 0; j < 64; ++j) {
            const double phi = 2.0 * kPi * (j + 0.3) / 64.0;
            const BoundaryCurvatures s = family_boundary_curvatures({1.0, t}, phi);
            const BoundaryCurvatures e = family_boundary_curvatures_exact({1.0, t}, phi);
            wn = std::max(wn, std::abs(s.kappa_n - e.kappa_n));
            wg = std::max(wg, std::abs(s.kappa_g - e.kappa_g));
        }
        n_res.push_back(wn);
        g_res.push_back(wg);
    }
    CHECK(std::abs(log_log_slope(ts, n_res) - 5.0) < 0.3);
    CHECK(std::abs(log_log_slope(ts, g_res) - 4.0) < 0.3);
}

TEST_CASE("series curvatures match a Frenet projection of the sampled boundary") {
    const SaddleFamily fam{1.0, 0.05};
    const int n = 512;
    CurveSamples samples;
    for (int j = 0; j < n; ++j) samples.points.push_back(family_point(fam, fam.radius, 2.0 * kPi * j / n));
    const FrenetFrames fr = frenet_analyze(samples, DerivativeScheme::spectral);
    double max_kn = 0.0, err_n = 0.0, err_g = 0.0;
    for (int j = 0; j < n; ++j) {
        const double phi = 2.0 * kPi * j / n;
        const Vec3 normal = family_boundary_normal(fam, phi);
        const Vec3 curvature = fr.kappa[j] * fr.normal[j];
        const double kn = curvature.dot(normal);
        const double kg = curvature.dot(normal.cross(fr.tangent[j]));
        const BoundaryCurvatures s = family_boundary_curvatures(fam, phi);
        max_kn = std::max(max_kn, std::abs(s.kappa_n));
        err_n = std::max(err_n, std::abs(kn - s.kappa_n));
        err_g = std::max(err_g, std::abs(kg - s.kappa_g) / s.kappa_g);
    }
    MESSAGE("kappa_n error / max " << err_n / max_kn << ", kappa_g relative error " << err_g);
    CHECK(err_n < 0.01 * max_kn);
    CHECK(err_g < 0.01);
}

TEST_CASE("boundary averages at leading order") {
    const double t = 1e-3;
    const BoundaryAverages a = family_boundary_averages({1.0, t});
    CHECK(a.integrated_abs_kappa_n == doctest::Approx(8.0 * t).epsilon(1e-4));
    CHECK(a.mean_abs_kappa_n == doctest::Approx(4.0 * t / kPi).epsilon(1e-4));
    for (const double s : {0.02, 0.05}) {
        const BoundaryAverages b = family_boundary_averages({1.0, s});
        CHECK(b.integrated_kappa_g == doctest::Approx(2.0 * kPi * (1.0 + 2.0 * s * s)).epsilon(10.0 * std::pow(s, 4.0)));
    }
}

TEST_CASE("two routes to the integrated Gaussian curvature") {
    for (const double t : {0.05, 0.1, 0.2}) {
        const GaussianCurvatureIntegral k = family_integrated_K({1.0, t});
        CAPTURE(t);
        CHECK(std::abs(k.direct - k.gauss_bonnet) < 1e-10);
        CHECK(k.leading_order == doctest::Approx(-4.0 * kPi * t * t));
        // The next term is close to -12 pi t^4.
        CHECK(std::abs(k.direct - k.leading_order) < 40.0 * std::pow(t, 4.0));
        CHECK(k.direct == doctest::Approx(family_gaussian_K({1.0, t}) * kPi).epsilon(0.1));
    }
}

TEST_CASE("pitchfork amplitude") {
    const double gs = gamma_star();
    CHECK(gs == 96.0 * kPi * kPi * kPi);
    CHECK(pitchfork_amplitude(gs) == 0.0);
    CHECK(pitchfork_amplitude(0.5 * gs) == 0.0);
    CHECK(pitchfork_amplitude(2.0 * gs) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-15));
    for (const double d : {1e-2, 1e-4, 1e-6}) {
        const double g = gs * (1.0 + d);
        CHECK(pitchfork_amplitude(g) / std::sqrt(g - gs) == doctest::Approx(std::sqrt(1.5 / gs)).epsilon(2.0 * d));
    }
    CHECK_THROWS_AS((void)pitchfork_amplitude(0.0), std::invalid_argument);
}

TEST_CASE("pitchfork root is stationary for the constrained series energy") {
    for (const double gamma : {2500.0, 3200.0, 4500.0}) {
        const auto energy = [gamma](std::complex<double> t) { return constrained_series_energy(t, gamma); };
        const double f2 = taylor_coefficient(energy, 2, 0.3);
        const double f4 = taylor_coefficient(energy, 4, 0.3);
        CAPTURE(gamma);
        CHECK(f2 == doctest::Approx((gamma_star() - gamma) / (4.0 * kPi)).epsilon(1e-10));
        CHECK(f4 == doctest::Approx(gamma / (12.0 * kPi)).epsilon(1e-10));
        CHECK(std::abs(taylor_coefficient(energy, 1, 0.3)) < 1e-10);
        CHECK(std::abs(taylor_coefficient(energy, 3, 0.3)) < 1e-10);
        const double t = pitchfork_amplitude(gamma);
        const double slope = 2.0 * f2 * t + 4.0 * f4 * t * t * t;
        CHECK(std::abs(slope) < 1e-8 * (std::abs(2.0 * f2 * t) + 1.0));
    }
}

TEST_CASE("series radius and exact radius") {
    CHECK(series_radius(0.0, 1.0) == doctest::Approx(1.0 / (2.0 * kPi)));
    for (const double t : {0.0, 0.1, 0.4}) {
        const double r = exact_radius(t, 1.0);
        CHECK(family_length({r, t}).quadrature == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS((void)exact_radius(0.1, 0.0), std::invalid_argument);
}

TEST_CASE("family mesh is a valid disk") {
    const DiskMesh d = family_mesh({1.0, 0.3}, 6, 24);
    const ValidationReport r = validate_mesh(d.mesh);
    CHECK(r.passed());
    CHECK(d.mesh.vertex_count() == 1 + 6 * 24);
    CHECK(d.mesh.boundary_loop().size() == 24);
    CHECK(gauss_bonnet_defect(d.mesh, d.positions) < 1e-12);
    CHECK_THROWS_AS((void)family_mesh({1.0, 0.3}, 0, 24), std::invalid_argument);
}

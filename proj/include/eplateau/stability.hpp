#pragma once

#include <vector>

namespace eplateau {

/// Flat circular disk spanning a loop of length L.
struct DiskSolution {
    double radius = 0.0;               // R = L / 2 pi
    double lagrange_multiplier = 0.0;  // beta, enforces L = 2 pi R
    double gamma = 0.0;                // sigma L^3 / alpha

    /// sigma R^3 + beta R^2 - alpha; zero up to rounding.
    [[nodiscard]] double cubic_residual(double sigma, double alpha) const;
};

/// Requires L > 0, alpha > 0, sigma >= 0.
[[nodiscard]] DiskSolution disk_solution(double length, double sigma, double alpha);

/// Second-order energy coefficient of the planar mode rho_k cos(k phi), scaled by R^3 / alpha:
/// (1 - k^2) gamma / (8 pi^3) + 2 (k^2 - 1)^2. Negative means the disk is unstable to mode k.
[[nodiscard]] double second_order_coefficient(int mode, double gamma);

/// gamma at which mode k >= 2 loses stability: 16 pi^3 (k^2 - 1).
[[nodiscard]] double critical_gamma(int mode);

struct ThresholdRow {
    int mode = 0;
    double gamma = 0.0;
    double k_l3_over_alpha = 0.0;  // (sqrt 3 / 4) gamma
};

[[nodiscard]] std::vector<ThresholdRow> threshold_table(int max_mode);

} // namespace eplateau

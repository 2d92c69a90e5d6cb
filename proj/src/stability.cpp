#include "eplateau/stability.hpp"

#include "eplateau/energy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace eplateau {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kPi3 = kPi * kPi * kPi;
} // namespace

double DiskSolution::cubic_residual(double sigma, double alpha) const {
    const double r2 = radius * radius;
    return sigma * r2 * radius + lagrange_multiplier * r2 - alpha;
}

DiskSolution disk_solution(double length, double sigma, double alpha) {
    if (!(length > 0.0) || !(alpha > 0.0) || !(sigma >= 0.0)) {
        throw std::invalid_argument("disk_solution: need L > 0, alpha > 0, sigma >= 0");
    }
    DiskSolution s;
    s.radius = length / (2.0 * kPi);
    const double r2 = s.radius * s.radius;
    s.lagrange_multiplier = (alpha - sigma * r2 * s.radius) / r2;
    s.gamma = sigma * length * length * length / alpha;
    return s;
}

double second_order_coefficient(int mode, double gamma) {
    if (mode < 1) throw std::invalid_argument("second_order_coefficient: mode must be >= 1");
    const double m2 = static_cast<double>(mode) * mode;
    return (1.0 - m2) * gamma / (8.0 * kPi3) + 2.0 * (m2 - 1.0) * (m2 - 1.0);
}

double critical_gamma(int mode) {
    if (mode < 2) {
        throw std::invalid_argument("critical_gamma: mode " + std::to_string(mode) + " has no buckling threshold");
    }
    const double m2 = static_cast<double>(mode) * mode;
    return 16.0 * kPi3 * (m2 - 1.0);
}

std::vector<ThresholdRow> threshold_table(int max_mode) {
    std::vector<ThresholdRow> rows;
    for (int k = 2; k <= max_mode; ++k) {
        const double g = critical_gamma(k);
        rows.push_back({k, g, spring_k_from_sigma(g)});
    }
    return rows;
}

} // namespace eplateau

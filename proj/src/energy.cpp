#include "eplateau/energy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace eplateau {

namespace {

constexpr double kDegenerateEdgeRatio = 1e-12;

struct BoundaryEdges {
    std::vector<Vec3> tangent;  // unit tangent of edge i = loop[i] -> loop[i+1]
    std::vector<double> length;
    double total = 0.0;
};

BoundaryEdges boundary_edges(const TriMesh& mesh, const Configuration& x, double target_length) {
    const auto& loop = mesh.boundary_loop();
    const std::size_t n = loop.size();
    BoundaryEdges be;
    be.tangent.resize(n);
    be.length.resize(n);
    const double floor = kDegenerateEdgeRatio * target_length;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 e = x.col(loop[(i + 1) % n]) - x.col(loop[i]);
        const double s = e.norm();
        if (!(s >= floor)) {
            throw DegenerateGeometry("collapsed boundary edge " + std::to_string(loop[i]) + "-" +
                                     std::to_string(loop[(i + 1) % n]));
        }
        be.tangent[i] = e / s;
        be.length[i] = s;
        be.total += s;
    }
    return be;
}

} // namespace

void EnergyParams::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive");
    if (!(spring_k >= 0.0) || !std::isfinite(spring_k)) throw std::invalid_argument("spring_k must be >= 0");
    if (!(target_length > 0.0) || !std::isfinite(target_length)) {
        throw std::invalid_argument("target_length must be positive");
    }
    if (!(length_penalty_k >= 0.0) || !std::isfinite(length_penalty_k)) {
        throw std::invalid_argument("length_penalty_k must be >= 0");
    }
}

EnergyBreakdown energy(const TriMesh& mesh, const Configuration& x, const EnergyParams& p) {
    EnergyBreakdown out;
    const auto& loop = mesh.boundary_loop();
    const std::size_t n = loop.size();
    const BoundaryEdges be = boundary_edges(mesh, x, p.target_length);

    // sum <s_v> kappa_v^2 = sum |t_v - t_{v-1}|^2 / <s_v>
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t prev = (i + n - 1) % n;
        const double avg = 0.5 * (be.length[i] + be.length[prev]);
        out.bending += (be.tangent[i] - be.tangent[prev]).squaredNorm() / avg;
    }
    out.bending *= p.alpha;

    for (const auto& [a, b] : mesh.interior_edges()) out.springs += (x.col(a) - x.col(b)).squaredNorm();
    out.springs *= p.spring_k;

    if (p.penalty_kind == LengthPenalty::total) {
        const double d = be.total - p.target_length;
        out.length_penalty = p.length_penalty_k * d * d;
    } else {
        const double rest = p.target_length / static_cast<double>(n);
        for (double s : be.length) out.length_penalty += (s - rest) * (s - rest);
        out.length_penalty *= p.length_penalty_k;
    }

    out.boundary_length = be.total;
    out.total = out.bending + out.springs + out.length_penalty;
    return out;
}

Configuration gradient(const TriMesh& mesh, const Configuration& x, const EnergyParams& p, EnergyBreakdown* out) {
    Configuration g = Configuration::Zero(3, x.cols());
    const auto& loop = mesh.boundary_loop();
    const std::size_t n = loop.size();
    const BoundaryEdges be = boundary_edges(mesh, x, p.target_length);

    // dE/d(edge vector) for every boundary edge, scattered to vertices at the end.
    std::vector<Vec3> de(n, Vec3::Zero());
    double bending = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t prev = (i + n - 1) % n;
        const Vec3& t1 = be.tangent[i];
        const Vec3& t0 = be.tangent[prev];
        const double w = 0.5 * (be.length[i] + be.length[prev]);
        const double c = t1.dot(t0);
        const double num = 2.0 - 2.0 * c;
        bending += num / w;
        // term = alpha (2 - 2c) / w
        const double dterm_dc = -2.0 * p.alpha / w;
        const double dterm_dw = -p.alpha * num / (w * w);
        const Vec3 dc_de1 = (t0 - c * t1) / be.length[i];
        const Vec3 dc_de0 = (t1 - c * t0) / be.length[prev];
        de[i] += dterm_dc * dc_de1 + dterm_dw * 0.5 * t1;
        de[prev] += dterm_dc * dc_de0 + dterm_dw * 0.5 * t0;
    }

    double penalty = 0.0;
    if (p.penalty_kind == LengthPenalty::total) {
        const double d = be.total - p.target_length;
        penalty = p.length_penalty_k * d * d;
        const double coeff = 2.0 * p.length_penalty_k * d;
        for (std::size_t i = 0; i < n; ++i) de[i] += coeff * be.tangent[i];
    } else {
        const double rest = p.target_length / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = be.length[i] - rest;
            penalty += d * d;
            de[i] += 2.0 * p.length_penalty_k * d * be.tangent[i];
        }
        penalty *= p.length_penalty_k;
    }

    for (std::size_t i = 0; i < n; ++i) {
        g.col(loop[(i + 1) % n]) += de[i];
        g.col(loop[i]) -= de[i];
    }

    double springs = 0.0;
    const double two_k = 2.0 * p.spring_k;
    for (const auto& [a, b] : mesh.interior_edges()) {
        const Vec3 e = x.col(a) - x.col(b);
        springs += e.squaredNorm();
        g.col(a) += two_k * e;
        g.col(b) -= two_k * e;
    }

    if (out != nullptr) {
        out->bending = p.alpha * bending;
        out->springs = p.spring_k * springs;
        out->length_penalty = penalty;
        out->boundary_length = be.total;
        out->total = out->bending + out->springs + out->length_penalty;
    }
    return g;
}

double sigma_from_spring_k(double spring_k) { return 4.0 * spring_k / std::sqrt(3.0); }

double spring_k_from_sigma(double sigma) { return std::sqrt(3.0) * sigma / 4.0; }

DimensionlessGroups gamma_numeric(double spring_k, double length, double alpha) {
    if (!(length > 0.0) || !(alpha > 0.0) || !(spring_k >= 0.0)) {
        throw std::invalid_argument("gamma_numeric: need spring_k >= 0, length > 0, alpha > 0");
    }
    const double kl3 = spring_k * length * length * length / alpha;
    return {kl3, sigma_from_spring_k(kl3)};
}

} // namespace eplateau

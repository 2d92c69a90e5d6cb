#include "eplateau/optimizer.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

namespace eplateau {

namespace {

struct LinePoint {
    double step = 0.0;
    double f = 0.0;
    double slope = 0.0;  // directional derivative
    Eigen::VectorXd grad;
};

class LineSearch {
public:
    LineSearch(const Objective& objective, const Eigen::VectorXd& x, const Eigen::VectorXd& dir, double f0,
               double slope0, const CgSettings& settings)
        : objective_(objective), x_(x), dir_(dir), f0_(f0), slope0_(slope0), s_(settings),
          roundoff_(1e-12 * std::max(1.0, std::abs(f0))) {}

    std::optional<LinePoint> run(double initial_step) {
        LinePoint prev{0.0, f0_, slope0_, {}};
        double step = initial_step;
        for (int i = 0; i < kMaxBracket; ++i) {
            LinePoint p = evaluate(step);
            if (!std::isfinite(p.f) || too_high(p) || (i > 0 && p.f >= prev.f && !in_roundoff(p))) {
                return zoom(prev, p);
            }
            if (curvature_ok(p)) return p;
            if (p.slope >= 0.0) return zoom(p, prev);
            prev = std::move(p);
            step *= 4.0;
        }
        return std::nullopt;
    }

private:
    static constexpr int kMaxBracket = 60;
    static constexpr int kMaxZoom = 80;

    LinePoint evaluate(double step) const {
        LinePoint p;
        p.step = step;
        p.grad.resize(x_.size());
        const Eigen::VectorXd trial = x_ + step * dir_;
        try {
            p.f = objective_(trial, p.grad);
        } catch (const DegenerateGeometry&) {
            p.f = std::numeric_limits<double>::infinity();
            p.slope = std::numeric_limits<double>::quiet_NaN();
            return p;
        }
        if (std::isnan(p.f) || !p.grad.allFinite()) throw NumericalFailure("NaN in energy or gradient");
        p.slope = p.grad.dot(dir_);
        return p;
    }

    bool in_roundoff(const LinePoint& p) const { return std::abs(p.f - f0_) <= roundoff_; }

    // Armijo condition. Once energy differences are at the level of
    // floating-point noise only the sign of the directional derivative is used.
    bool too_high(const LinePoint& p) const {
        if (in_roundoff(p)) return p.slope > 0.0;
        return p.f > f0_ + s_.wolfe_c1 * p.step * slope0_;
    }

    bool curvature_ok(const LinePoint& p) const { return std::abs(p.slope) <= -s_.wolfe_c2 * slope0_; }

    static double interpolate(const LinePoint& lo, const LinePoint& hi) {
        const double a = lo.step;
        const double b = hi.step;
        const double width = std::abs(b - a);
        const double lower = std::min(a, b) + 0.1 * width;
        const double upper = std::max(a, b) - 0.1 * width;
        if (std::isfinite(hi.f) && std::isfinite(hi.slope)) {
            // Minimizer of the cubic through (a, f_a, d_a), (b, f_b, d_b).
            const double d1 = lo.slope + hi.slope - 3.0 * (lo.f - hi.f) / (a - b);
            const double disc = d1 * d1 - lo.slope * hi.slope;
            if (disc >= 0.0) {
                const double d2 = std::copysign(std::sqrt(disc), b - a);
                const double denom = hi.slope - lo.slope + 2.0 * d2;
                if (denom != 0.0) {
                    const double c = b - (b - a) * (hi.slope + d2 - d1) / denom;
                    if (std::isfinite(c) && c >= lower && c <= upper) return c;
                }
            }
        }
        return 0.5 * (a + b);
    }

    std::optional<LinePoint> zoom(LinePoint lo, LinePoint hi) {
        for (int j = 0; j < kMaxZoom; ++j) {
            const double step = interpolate(lo, hi);
            if (std::abs(hi.step - lo.step) <= 1e-15 * std::max(std::abs(lo.step), std::abs(hi.step))) break;
            LinePoint p = evaluate(step);
            if (!std::isfinite(p.f) || too_high(p) || (p.f >= lo.f && !in_roundoff(p))) {
                hi = std::move(p);
                continue;
            }
            if (curvature_ok(p)) return p;
            if (p.slope * (hi.step - lo.step) >= 0.0) hi = std::move(lo);
            lo = std::move(p);
        }
        return std::nullopt;
    }

    const Objective& objective_;
    const Eigen::VectorXd& x_;
    const Eigen::VectorXd& dir_;
    double f0_;
    double slope0_;
    const CgSettings& s_;
    double roundoff_;
};

double infinity_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

} // namespace

std::string_view to_string(MinimizeStatus status) {
    switch (status) {
    case MinimizeStatus::converged: return "converged";
    case MinimizeStatus::max_iterations: return "max_iterations";
    case MinimizeStatus::line_search_failed: return "line_search_failed";
    }
    return "unknown";
}

void MinimizeOptions::validate() const {
    if (max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
    if (!(gradient_tolerance > 0.0)) throw std::invalid_argument("gradient_tolerance must be positive");
    if (!(wolfe_c1 > 0.0 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0)) {
        throw std::invalid_argument("need 0 < wolfe_c1 < wolfe_c2 < 1");
    }
    if (restart_interval < 0) throw std::invalid_argument("restart_interval must be >= 0");
    if (!(perturbation_amplitude >= 0.0)) throw std::invalid_argument("perturbation_amplitude must be >= 0");
    if (preconditioner_refresh < 0) throw std::invalid_argument("preconditioner_refresh must be >= 0");
}

CgResult conjugate_gradient(const Objective& objective, Eigen::VectorXd x0, const CgSettings& settings) {
    CgResult out;
    out.x = std::move(x0);
    out.grad.resize(out.x.size());
    out.f = objective(out.x, out.grad);
    if (std::isnan(out.f) || !out.grad.allFinite()) throw NumericalFailure("NaN in energy or gradient");

    double gnorm = infinity_norm(out.grad);
    out.f_history.push_back(out.f);
    out.gnorm_history.push_back(gnorm);

    Preconditioner* const pre = settings.preconditioner;
    auto precondition = [&](const Eigen::VectorXd& g) -> Eigen::VectorXd { return pre ? pre->apply(g) : g; };
    if (pre) pre->refresh(out.x, out.grad);

    Eigen::VectorXd z = precondition(out.grad);
    Eigen::VectorXd dir = -z;
    double previous_step = 0.0;
    double previous_slope = 0.0;
    int since_restart = 0;
    int since_refresh = 0;

    for (int iter = 0;; ++iter) {
        out.iterations = iter;
        if (settings.on_iteration) settings.on_iteration(iter, out.f, gnorm);
        if (gnorm <= settings.gradient_tolerance) {
            out.status = MinimizeStatus::converged;
            return out;
        }
        if (iter >= settings.max_iterations) {
            out.status = MinimizeStatus::max_iterations;
            return out;
        }

        double slope = out.grad.dot(dir);
        if (!(slope < 0.0)) {
            dir = -z;
            slope = out.grad.dot(dir);
            since_restart = 0;
        }
        if (!(slope < 0.0)) {
            dir = -out.grad;
            slope = -out.grad.squaredNorm();
        }

        // A preconditioned direction is Newton-like right after a restart, so try its full length.
        double step = previous_step > 0.0 ? previous_step * previous_slope / slope
                                          : settings.initial_step / infinity_norm(dir);
        if (pre && since_restart == 0) step = 1.0;
        if (!(step > 0.0) || !std::isfinite(step)) step = settings.initial_step / infinity_norm(dir);

        std::optional<LinePoint> accepted =
            LineSearch(objective, out.x, dir, out.f, slope, settings).run(step);
        if (!accepted && (since_restart > 0 || pre)) {
            // Retry along steepest descent before giving up.
            dir = -out.grad;
            slope = -out.grad.squaredNorm();
            since_restart = 0;
            accepted = LineSearch(objective, out.x, dir, out.f, slope, settings)
                           .run(settings.initial_step / infinity_norm(dir));
        }
        if (!accepted) {
            out.status = MinimizeStatus::line_search_failed;
            return out;
        }
        const double roundoff = 1e-12 * std::max(1.0, std::abs(out.f));
        if (accepted->f > out.f + roundoff) throw NumericalFailure("line search accepted an energy increase");
        if (settings.verify_wolfe) {
            const bool decrease = accepted->f <= out.f + settings.wolfe_c1 * accepted->step * slope ||
                                  std::abs(accepted->f - out.f) <= roundoff;
            const bool curvature = std::abs(accepted->slope) <= -settings.wolfe_c2 * slope;
            if (!decrease || !curvature) throw NumericalFailure("accepted step violates strong Wolfe conditions");
        }

        out.x += accepted->step * dir;
        Eigen::VectorXd new_grad = std::move(accepted->grad);
        out.f = accepted->f;
        previous_step = accepted->step;
        previous_slope = slope;

        ++since_restart;
        ++since_refresh;
        const bool refresh = pre && settings.preconditioner_refresh > 0 && since_refresh >= settings.preconditioner_refresh;
        const bool periodic_restart =
            refresh || (settings.restart_interval > 0 && since_restart >= settings.restart_interval);
        if (refresh) {
            pre->refresh(out.x, new_grad);
            since_refresh = 0;
        }
        Eigen::VectorXd new_z = precondition(new_grad);
        // Polak-Ribiere+ in the preconditioned inner product.
        const double beta = refresh ? 0.0 : std::max(0.0, new_grad.dot(new_z - z) / out.grad.dot(z));
        if (periodic_restart || beta == 0.0) {
            dir = -new_z;
            since_restart = 0;
        } else {
            dir = -new_z + beta * dir;
        }
        out.grad = std::move(new_grad);
        z = std::move(new_z);
        gnorm = infinity_norm(out.grad);
        out.f_history.push_back(out.f);
        out.gnorm_history.push_back(gnorm);
    }
}

HessianPreconditioner::HessianPreconditioner(Objective objective, double step, double relative_floor)
    : objective_(std::move(objective)), step_(step), relative_floor_(relative_floor) {
    if (!(step > 0.0) || !(relative_floor > 0.0)) {
        throw std::invalid_argument("HessianPreconditioner: step and floor must be positive");
    }
}

void HessianPreconditioner::refresh(const Eigen::VectorXd& x, const Eigen::VectorXd& grad) {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd h(n, n);
    Eigen::VectorXd probe = x;
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        probe(i) = x(i) + step_;
        objective_(probe, g);
        h.col(i) = (g - grad) / step_;
        probe(i) = x(i);
    }
    const Eigen::MatrixXd sym = 0.5 * (h + h.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success) throw NumericalFailure("Hessian eigendecomposition failed");
    // |lambda| keeps the direction a descent direction at saddles; the floor bounds the condition number.
    const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
    const double floor = std::max(relative_floor_ * top, std::numeric_limits<double>::min());
    basis_ = eig.eigenvectors();
    inverse_ = eig.eigenvalues().cwiseAbs().cwiseMax(floor).cwiseInverse();
    ++refresh_count_;
}

Eigen::VectorXd HessianPreconditioner::apply(const Eigen::VectorXd& grad) const {
    if (basis_.size() == 0) return grad;
    return basis_ * inverse_.cwiseProduct(basis_.transpose() * grad);
}

Configuration perturb(const Configuration& x, double amplitude, std::uint64_t seed) {
    if (!(amplitude >= 0.0)) throw std::invalid_argument("perturb: amplitude must be >= 0");
    Configuration out = x;
    if (amplitude == 0.0) return out;
    // Bits are mapped to [0, 1) by hand so the stream is identical on every standard library.
    std::mt19937_64 rng(seed);
    for (Eigen::Index i = 0; i < out.cols(); ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        out(2, i) += amplitude * (2.0 * u - 1.0);
    }
    return out;
}

double gradient_scale(const EnergyParams& p) {
    return p.spring_k * p.target_length + p.alpha / (p.target_length * p.target_length);
}

namespace {

// Interior positions that minimize the spring energy for given boundary positions.
// Bending and the length penalty only see boundary vertices, so the interior enters
// the energy through the springs alone and its optimum is a linear solve.
class InteriorSolver {
public:
    InteriorSolver(const TriMesh& mesh) : slot_(static_cast<std::size_t>(mesh.vertex_count()), -1) {
        const auto& on_boundary = mesh.is_boundary_vertex();
        for (int v = 0; v < mesh.vertex_count(); ++v) {
            if (on_boundary[v]) {
                boundary_.push_back(v);
            } else {
                slot_[v] = static_cast<int>(interior_.size());
                interior_.push_back(v);
            }
        }
        const auto ni = static_cast<Eigen::Index>(interior_.size());
        const auto nb = static_cast<Eigen::Index>(boundary_.size());
        std::vector<int> boundary_slot(slot_.size(), -1);
        for (std::size_t i = 0; i < boundary_.size(); ++i) boundary_slot[boundary_[i]] = static_cast<int>(i);

        std::vector<Eigen::Triplet<double>> ii, ib;
        auto couple = [&](int a, int b) {
            if (slot_[a] < 0) return;
            ii.emplace_back(slot_[a], slot_[a], 1.0);
            if (slot_[b] >= 0) {
                ii.emplace_back(slot_[a], slot_[b], -1.0);
            } else {
                ib.emplace_back(slot_[a], boundary_slot[b], 1.0);
            }
        };
        for (const auto& [a, b] : mesh.interior_edges()) {
            couple(a, b);
            couple(b, a);
        }
        Eigen::SparseMatrix<double> laplacian(ni, ni);
        laplacian.setFromTriplets(ii.begin(), ii.end());
        coupling_.resize(ni, nb);
        coupling_.setFromTriplets(ib.begin(), ib.end());
        if (ni > 0) {
            factor_.compute(laplacian);
            if (factor_.info() != Eigen::Success) throw DegenerateGeometry("interior is not connected to the boundary");
        }
    }

    [[nodiscard]] const std::vector<int>& boundary() const { return boundary_; }

    [[nodiscard]] Eigen::VectorXd pack(const Configuration& x) const {
        Eigen::VectorXd flat(3 * static_cast<Eigen::Index>(boundary_.size()));
        for (std::size_t i = 0; i < boundary_.size(); ++i) {
            flat.segment<3>(3 * static_cast<Eigen::Index>(i)) = x.col(boundary_[i]);
        }
        return flat;
    }

    // Full configuration with the given boundary and the optimal interior.
    [[nodiscard]] Configuration unpack(const Eigen::VectorXd& flat, Eigen::Index cols) const {
        Configuration x(3, cols);
        const auto nb = static_cast<Eigen::Index>(boundary_.size());
        Eigen::MatrixXd xb(nb, 3);
        for (Eigen::Index i = 0; i < nb; ++i) {
            const Vec3 p = flat.segment<3>(3 * i);
            xb.row(i) = p.transpose();
            x.col(boundary_[static_cast<std::size_t>(i)]) = p;
        }
        if (!interior_.empty()) {
            const Eigen::MatrixXd xi = factor_.solve(coupling_ * xb);
            for (std::size_t i = 0; i < interior_.size(); ++i) {
                x.col(interior_[i]) = xi.row(static_cast<Eigen::Index>(i)).transpose();
            }
        }
        return x;
    }

private:
    std::vector<int> slot_;
    std::vector<int> boundary_;
    std::vector<int> interior_;
    Eigen::SparseMatrix<double> coupling_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor_;
};

} // namespace

// Beyond this many reduced variables the dense Hessian costs more than it saves.
constexpr Eigen::Index kMaxDensePreconditioner = 1500;

MinimizeResult minimize(const TriMesh& mesh, const Configuration& x0, const EnergyParams& p,
                        const MinimizeOptions& opts) {
    p.validate();
    opts.validate();
    if (x0.cols() != mesh.vertex_count()) throw std::invalid_argument("configuration size does not match mesh");
    if (!x0.allFinite()) throw std::invalid_argument("configuration has non-finite coordinates");

    const Configuration start =
        opts.perturbation_amplitude > 0.0 ? perturb(x0, opts.perturbation_amplitude, opts.rng_seed) : x0;
    const Eigen::Index cols = start.cols();

    std::optional<InteriorSolver> reduced;
    // With no iterations allowed the start is returned untouched, interior included.
    if (opts.eliminate_interior && p.spring_k > 0.0 && opts.max_iterations > 0) reduced.emplace(mesh);

    Objective objective;
    Eigen::VectorXd flat0;
    if (reduced) {
        // Energy of the boundary with the interior at its optimum. The interior gradient
        // vanishes there, so the reduced gradient is the boundary block of the full one.
        objective = [&](const Eigen::VectorXd& flat, Eigen::VectorXd& grad) {
            const Configuration x = reduced->unpack(flat, cols);
            EnergyBreakdown e;
            const Configuration g = gradient(mesh, x, p, &e);
            grad = reduced->pack(g);
            return e.total;
        };
        flat0 = reduced->pack(start);
    } else {
        objective = [&](const Eigen::VectorXd& flat, Eigen::VectorXd& grad) {
            const Eigen::Map<const Configuration> x(flat.data(), 3, cols);
            EnergyBreakdown e;
            const Configuration g = gradient(mesh, x, p, &e);
            grad = Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
            return e.total;
        };
        flat0 = Eigen::Map<const Eigen::VectorXd>(start.data(), start.size());
    }

    CgSettings settings;
    settings.max_iterations = opts.max_iterations;
    settings.gradient_tolerance = opts.gradient_tolerance * gradient_scale(p);
    settings.wolfe_c1 = opts.wolfe_c1;
    settings.wolfe_c2 = opts.wolfe_c2;
    settings.restart_interval = opts.restart_interval;
    settings.initial_step = 1e-3 * p.target_length;
    settings.verify_wolfe = opts.verify_wolfe;

    std::optional<HessianPreconditioner> hessian;
    if (opts.precondition && reduced && flat0.size() <= kMaxDensePreconditioner) {
        hessian.emplace(objective, 1e-7 * p.target_length);
        settings.preconditioner = &*hessian;
        settings.preconditioner_refresh = opts.preconditioner_refresh;
    }

    const CgResult cg = conjugate_gradient(objective, std::move(flat0), settings);

    MinimizeResult result;
    result.final_configuration =
        reduced ? reduced->unpack(cg.x, cols) : Configuration(Eigen::Map<const Configuration>(cg.x.data(), 3, cols));
    result.final_energy = energy(mesh, result.final_configuration, p);
    result.iterations = cg.iterations;
    result.status = cg.status;
    result.converged = cg.status == MinimizeStatus::converged;
    result.final_gradient_norm = cg.gnorm_history.back();
    result.gradient_norm_history = cg.gnorm_history;
    result.energy_history = cg.f_history;

    if (opts.on_iteration) {
        // Replays the history with the boundary length error, which the generic CG does not know.
        for (std::size_t i = 0; i < cg.f_history.size(); ++i) {
            IterationRecord rec;
            rec.iteration = static_cast<int>(i);
            rec.energy = cg.f_history[i];
            rec.gradient_norm = cg.gnorm_history[i];
            rec.boundary_length_error = std::numeric_limits<double>::quiet_NaN();
            if (i + 1 == cg.f_history.size()) {
                rec.boundary_length_error =
                    std::abs(result.final_energy.boundary_length - p.target_length) / p.target_length;
            }
            opts.on_iteration(rec);
        }
    }
    return result;
}

double default_length_penalty(const EnergyParams& p, std::size_t boundary_edges) {
    const double base = gradient_scale(p) / p.target_length;
    return p.penalty_kind == LengthPenalty::total ? 1e4 * base : 1e3 * base * static_cast<double>(boundary_edges);
}

RelaxResult relax(const TriMesh& mesh, const Configuration& x0, EnergyParams p, const RelaxOptions& opts) {
    if (p.length_penalty_k <= 0.0) p.length_penalty_k = default_length_penalty(p, mesh.boundary_edges().size());
    RelaxResult out;
    MinimizeOptions mopts = opts.minimize;
    Configuration start = x0;
    for (int round = 0;; ++round) {
        out.result = minimize(mesh, start, p, mopts);
        out.final_params = p;
        out.penalty_rounds = round;
        out.length_error = std::abs(out.result.final_energy.boundary_length - p.target_length) / p.target_length;
        if (out.length_error < opts.length_tolerance || round + 1 >= opts.max_penalty_rounds) break;
        // Later rounds continue from the relaxed state without re-perturbing it.
        p.length_penalty_k *= opts.penalty_growth;
        start = out.result.final_configuration;
        mopts.perturbation_amplitude = 0.0;
    }
    return out;
}

} // namespace eplateau

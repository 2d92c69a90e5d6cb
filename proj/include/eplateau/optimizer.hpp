#pragma once

#include "eplateau/energy.hpp"
#include "eplateau/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/Sparse>

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace eplateau {

struct IterationRecord {
    int iteration = 0;
    double energy = 0.0;
    double gradient_norm = 0.0;       // infinity norm
    double boundary_length_error = 0.0;  // relative, only filled by minimize()
};

struct MinimizeOptions {
    int max_iterations = 50000;
    double gradient_tolerance = 1e-7;  // relative to (k L + alpha / L^2)
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.1;
    int restart_interval = 2000;       // 0 disables periodic restarts
    std::uint64_t rng_seed = 1;
    double perturbation_amplitude = 0.0;  // out-of-plane noise applied to x0 before minimizing
    bool verify_wolfe = false;            // re-check Wolfe conditions on each accepted step
    bool eliminate_interior = true;       // solve interior vertices exactly, iterate on the boundary only
    bool precondition = true;             // dense Hessian preconditioner on the reduced problem
    int preconditioner_refresh = 200;     // iterations between Hessian refreshes
    std::function<void(const IterationRecord&)> on_iteration;

    void validate() const;
};

enum class MinimizeStatus {
    converged,
    max_iterations,
    line_search_failed,
};

[[nodiscard]] std::string_view to_string(MinimizeStatus status);

struct MinimizeResult {
    Configuration final_configuration;
    EnergyBreakdown final_energy;
    int iterations = 0;
    bool converged = false;
    MinimizeStatus status = MinimizeStatus::max_iterations;
    double final_gradient_norm = 0.0;  // infinity norm
    std::vector<double> gradient_norm_history;
    std::vector<double> energy_history;  // energy after each accepted step, starting with x0
};

// ---------------------------------------------------------------------------
// Generic Polak-Ribiere+ conjugate gradient
// ---------------------------------------------------------------------------

/// Returns f(x) and writes the gradient into `grad`.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// Approximate inverse Hessian for preconditioned CG; must be symmetric positive definite.
/// refresh() is only called at x0 and right before a restart, so one operator is used per
/// conjugate sequence.
class Preconditioner {
public:
    virtual ~Preconditioner() = default;
    virtual void refresh(const Eigen::VectorXd& x, const Eigen::VectorXd& grad) = 0;
    [[nodiscard]] virtual Eigen::VectorXd apply(const Eigen::VectorXd& grad) const = 0;
};

/// Dense Hessian by forward differences of the gradient, with eigenvalues replaced by
/// max(|lambda|, relative_floor * max |lambda|). Costs one gradient per variable per refresh.
class HessianPreconditioner final : public Preconditioner {
public:
    HessianPreconditioner(Objective objective, double step, double relative_floor = 1e-8);

    void refresh(const Eigen::VectorXd& x, const Eigen::VectorXd& grad) override;
    [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& grad) const override;
    [[nodiscard]] int refresh_count() const { return refresh_count_; }

private:
    Objective objective_;
    double step_;
    double relative_floor_;
    Eigen::MatrixXd basis_;
    Eigen::VectorXd inverse_;
    int refresh_count_ = 0;
};

struct CgSettings {
    int max_iterations = 1000;
    double gradient_tolerance = 1e-8;  // absolute, infinity norm
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.1;
    int restart_interval = 0;
    double initial_step = 1.0;  // infinity-norm length of the very first trial step
    bool verify_wolfe = false;
    Preconditioner* preconditioner = nullptr;  // not owned
    int preconditioner_refresh = 0;            // iterations between refreshes; 0 = only at x0
    std::function<void(int iteration, double f, double gnorm)> on_iteration;
};

struct CgResult {
    Eigen::VectorXd x;
    double f = 0.0;
    Eigen::VectorXd grad;
    int iterations = 0;
    MinimizeStatus status = MinimizeStatus::max_iterations;
    std::vector<double> f_history;
    std::vector<double> gnorm_history;
};

[[nodiscard]] CgResult conjugate_gradient(const Objective& objective, Eigen::VectorXd x0, const CgSettings& settings);

// ---------------------------------------------------------------------------
// Mesh energy minimization
// ---------------------------------------------------------------------------

/// Adds uniform noise in [-amplitude, amplitude] to the z coordinate of every vertex.
[[nodiscard]] Configuration perturb(const Configuration& x, double amplitude, std::uint64_t seed);

/// Gradient scale k L + alpha / L^2 used to make the tolerance unit-free.
[[nodiscard]] double gradient_scale(const EnergyParams& p);

/// Minimizes energy() from x0. Throws NumericalFailure on NaN energy or gradient.
[[nodiscard]] MinimizeResult minimize(const TriMesh& mesh, const Configuration& x0, const EnergyParams& p,
                                      const MinimizeOptions& opts);

struct RelaxOptions {
    MinimizeOptions minimize;
    double length_tolerance = 1e-3;  // relative boundary length error accepted
    int max_penalty_rounds = 5;
    double penalty_growth = 10.0;
};

struct RelaxResult {
    MinimizeResult result;
    EnergyParams final_params;  // with the escalated penalty stiffness
    int penalty_rounds = 0;
    double length_error = 0.0;  // |sum |e| - L| / L
};

/// Starting penalty stiffness when none is given: 1e4 s / L for the total-length
/// penalty and 1e3 s n / L per edge, with s = k L + alpha / L^2 and n boundary edges.
[[nodiscard]] double default_length_penalty(const EnergyParams& p, std::size_t boundary_edges);

/// minimize() wrapped in the penalty escalation loop: re-minimizes with a stiffer
/// length penalty until the boundary length error is below tolerance.
[[nodiscard]] RelaxResult relax(const TriMesh& mesh, const Configuration& x0, EnergyParams p,
                                const RelaxOptions& opts);

} // namespace eplateau

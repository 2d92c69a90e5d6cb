#include "eplateau/fit.hpp"

#include <Eigen/LU>
#include <unsupported/Eigen/LevenbergMarquardt>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace eplateau {

std::vector<DiagramPoint> fit_window_points(const BifurcationDiagram& diagram, double gamma_estimate,
                                            const FitWindow& window) {
    if (!(gamma_estimate > 0.0) || !(window.relative_width > 0.0) || !(window.length > 0.0)) {
        throw std::invalid_argument("fit window needs gamma_estimate > 0, width > 0, length > 0");
    }
    const double hi = (1.0 + window.relative_width) * gamma_estimate;
    const double floor = window.noise_floor * 2.0 * std::numbers::pi / window.length;
    std::vector<DiagramPoint> pts;
    for (const auto& p : diagram.points) {
        if (p.converged && p.gamma > gamma_estimate && p.gamma <= hi && p.mean_abs_kappa_n > floor) pts.push_back(p);
    }
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.gamma < b.gamma; });
    if (window.stop_at_peak && !pts.empty()) {
        // Past the maximum the branch is leaving the pitchfork regime.
        const auto peak = std::max_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
            return a.mean_abs_kappa_n < b.mean_abs_kappa_n;
        });
        pts.erase(peak + 1, pts.end());
    }
    return pts;
}

namespace {

// Parameters: log A, u, p with gamma_c = g1 (1 - e^u) kept below the first window point g1.
struct PowerLaw : Eigen::DenseFunctor<double> {
    PowerLaw(const Eigen::VectorXd& g, const Eigen::VectorXd& y)
        : DenseFunctor(3, static_cast<int>(g.size())), gamma(g), value(y) {}

    double gamma_c(const InputType& th) const { return gamma(0) * (1.0 - std::exp(th(1))); }

    int operator()(const InputType& th, ValueType& r) const {
        const double a = std::exp(th(0));
        const double gc = gamma_c(th);
        for (Eigen::Index i = 0; i < gamma.size(); ++i) r(i) = a * std::pow(gamma(i) - gc, th(2)) - value(i);
        return 0;
    }

    int df(const InputType& th, JacobianType& j) const {
        const double a = std::exp(th(0));
        const double gc = gamma_c(th);
        const double shift = gamma(0) * std::exp(th(1));
        for (Eigen::Index i = 0; i < gamma.size(); ++i) {
            const double d = gamma(i) - gc;
            const double model = a * std::pow(d, th(2));
            j(i, 0) = model;
            j(i, 1) = model * th(2) / d * shift;
            j(i, 2) = model * std::log(d);
        }
        return 0;
    }

    Eigen::VectorXd gamma;
    Eigen::VectorXd value;
};

struct LogLinear {
    double log_a = 0.0;
    double p = 0.0;
    double rss = std::numeric_limits<double>::infinity();
};

// Straight line through (log(gamma - gc), log y), scored by the residual in y itself.
LogLinear log_linear_guess(const Eigen::VectorXd& g, const Eigen::VectorXd& y, double gc) {
    const Eigen::Index n = g.size();
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, 0) = 1.0;
        a(i, 1) = std::log(g(i) - gc);
        b(i) = std::log(y(i));
    }
    const Eigen::Vector2d c = a.colPivHouseholderQr().solve(b);
    LogLinear out{c(0), c(1), 0.0};
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = std::exp(c(0)) * std::pow(g(i) - gc, c(1)) - y(i);
        out.rss += r * r;
    }
    return out;
}

} // namespace

ExponentFit fit_exponent(const BifurcationDiagram& diagram, double gamma_estimate, const FitWindow& window) {
    const std::vector<DiagramPoint> pts = fit_window_points(diagram, gamma_estimate, window);
    const auto n = static_cast<Eigen::Index>(pts.size());
    if (n < 6) {
        throw Error("fit_exponent: " + std::to_string(n) + " usable points in the window, need at least 6");
    }
    Eigen::VectorXd g(n), y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        g(i) = pts[static_cast<std::size_t>(i)].gamma;
        y(i) = pts[static_cast<std::size_t>(i)].mean_abs_kappa_n;
    }

    // Start from the best log-log line over a logarithmic grid of gamma_c offsets.
    const double g1 = g(0);
    Eigen::Vector3d theta(0.0, std::log(1e-3), 0.5);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 120; ++k) {
        const double u = std::log(1e-7) + k * (std::log(0.5) - std::log(1e-7)) / 120.0;
        const LogLinear guess = log_linear_guess(g, y, g1 * (1.0 - std::exp(u)));
        if (guess.rss < best) {
            best = guess.rss;
            theta = Eigen::Vector3d(guess.log_a, u, guess.p);
        }
    }

    PowerLaw model(g, y);
    Eigen::VectorXd x = theta;
    Eigen::LevenbergMarquardt<PowerLaw> lm(model);
    lm.setMaxfev(2000);
    lm.setXtol(1e-14);
    lm.setFtol(1e-14);
    const auto status = lm.minimize(x);
    if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
        status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation || !x.allFinite()) {
        Eigen::VectorXd r(n);
        model(x, r);
        std::ostringstream msg;
        msg << "fit_exponent: least squares did not converge (status " << static_cast<int>(status)
            << ", residual norm " << r.norm() << ")";
        throw NumericalFailure(msg.str());
    }

    Eigen::VectorXd r(n);
    model(x, r);
    Eigen::MatrixXd jac(n, 3);
    model.df(x, jac);
    const double rss = r.squaredNorm();
    const double tss = (y.array() - y.mean()).square().sum();
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Matrix3d cov = jtj.inverse() * (rss / static_cast<double>(n - 3));

    ExponentFit fit;
    fit.exponent = x(2);
    fit.exponent_stderr = std::sqrt(std::max(0.0, cov(2, 2)));
    fit.gamma_c = model.gamma_c(x);
    fit.gamma_c_stderr = g1 * std::exp(x(1)) * std::sqrt(std::max(0.0, cov(1, 1)));
    fit.amplitude = std::exp(x(0));
    fit.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;
    fit.points = static_cast<int>(n);
    fit.window_lo = g(0);
    fit.window_hi = g(n - 1);
    return fit;
}

LinearFit fit_linear_K(const BifurcationDiagram& diagram, double gamma_estimate, const FitWindow& window) {
    const std::vector<DiagramPoint> pts = fit_window_points(diagram, gamma_estimate, window);
    const auto n = static_cast<Eigen::Index>(pts.size());
    if (n < 3) throw Error("fit_linear_K: " + std::to_string(n) + " usable points in the window, need at least 3");
    Eigen::MatrixXd a(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, 0) = 1.0;
        a(i, 1) = pts[static_cast<std::size_t>(i)].gamma;
        y(i) = pts[static_cast<std::size_t>(i)].integrated_K;
    }
    const Eigen::Vector2d c = a.colPivHouseholderQr().solve(y);
    const double rss = (a * c - y).squaredNorm();
    const double tss = (y.array() - y.mean()).square().sum();
    LinearFit fit;
    fit.intercept = c(0);
    fit.slope = c(1);
    fit.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;
    fit.points = static_cast<int>(n);
    return fit;
}

} // namespace eplateau

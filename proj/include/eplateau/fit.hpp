#pragma once

#include "eplateau/sweep.hpp"

namespace eplateau {

struct FitWindow {
    double relative_width = 0.25;  // window is (gamma_c, (1 + width) gamma_c]
    bool stop_at_peak = true;      // end the window at the first maximum of <|kappa_n|>
    double noise_floor = 1e-4;     // minimum <|kappa_n|> R, R = L / 2 pi
    double length = 1.0;           // L of the diagram's units
};

struct ExponentFit {
    double exponent = 0.0;
    double exponent_stderr = 0.0;
    double gamma_c = 0.0;
    double gamma_c_stderr = 0.0;
    double amplitude = 0.0;
    double r_squared = 0.0;
    int points = 0;
    double window_lo = 0.0;  // gamma range actually used
    double window_hi = 0.0;
};

/// Least squares of <|kappa_n|> = A (gamma - gamma_c)^p over the window above
/// `gamma_estimate`, with A, gamma_c and p free. Needs at least 6 usable points.
/// Throws Error when there are too few points and NumericalFailure when the fit
/// does not converge.
[[nodiscard]] ExponentFit fit_exponent(const BifurcationDiagram& diagram, double gamma_estimate,
                                       const FitWindow& window = {});

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int points = 0;
};

/// Ordinary least squares of integrated K against gamma over the same window.
[[nodiscard]] LinearFit fit_linear_K(const BifurcationDiagram& diagram, double gamma_estimate,
                                     const FitWindow& window = {});

/// Points of `diagram` inside the fit window, in increasing gamma.
[[nodiscard]] std::vector<DiagramPoint> fit_window_points(const BifurcationDiagram& diagram,
                                                          double gamma_estimate, const FitWindow& window);

} // namespace eplateau

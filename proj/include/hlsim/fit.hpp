#pragma once

#include <vector>

namespace hlsim {

/// Ordinary least-squares line fit y = intercept + slope * x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double slope_stderr = 0.0;
    double ci_lo = 0.0; // 95% confidence interval on the slope
    double ci_hi = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Power-law fit y = C x^p via log-log least squares; all y must be > 0.
/// Returns LineFit with slope = p and intercept = log(C).
LineFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

/// Spearman rank correlation.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

} // namespace hlsim

#include "hlsim/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hlsim {

namespace {
// two-sided 97.5% Student-t quantiles for small degrees of freedom
double t975(int df) {
    static const double tab[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447,
                                 2.365,  2.306, 2.262, 2.228, 2.201, 2.179};
    if (df <= 0) return 0.0;
    if (df <= 12) return tab[df - 1];
    return 1.960 + 2.4 / df; // adequate beyond the table
}
} // namespace

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("fit_line: need >= 2 matched points");
    const double xbar = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * (y[i] - ybar);
        syy += (y[i] - ybar) * (y[i] - ybar);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = ybar - f.slope * xbar;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    if (n > 2) {
        f.slope_stderr = std::sqrt(ss_res / (double)(n - 2) / sxx);
        const double t = t975((int)n - 2);
        f.ci_lo = f.slope - t * f.slope_stderr;
        f.ci_hi = f.slope + t * f.slope_stderr;
    } else {
        f.ci_lo = f.ci_hi = f.slope;
    }
    return f;
}

LineFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_power_law: data must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return fit_line(lx, ly);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("spearman: need >= 2 matched points");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i) r[idx[i]] = (double)i;
        return r;
    };
    const auto rx = ranks(x), ry = ranks(y);
    double num = 0.0, dx = 0.0, dy = 0.0;
    const double mean = (n - 1) / 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (rx[i] - mean) * (ry[i] - mean);
        dx += (rx[i] - mean) * (rx[i] - mean);
        dy += (ry[i] - mean) * (ry[i] - mean);
    }
    return num / std::sqrt(dx * dy);
}

} // namespace hlsim

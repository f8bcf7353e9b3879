#include "hlsim/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "hlsim/fit.hpp"

namespace hlsim {

WaveFunction translate(const WaveFunction& psi, double dR) {
    if (psi.grid.radial_mode()) throw std::invalid_argument("translate: line mode only");
    WaveFunction out = psi;
    if (dR == 0.0) return out;
    FftEngine fft(psi.grid.fft_dims());
    fft.forward(out.amplitudes);
    const int na = psi.grid.num_axes();
    const std::size_t n = (std::size_t)psi.grid.points_per_axis;
    for (std::size_t p = 0; p < out.amplitudes.size(); ++p) {
        std::size_t q = p;
        double ksum = 0.0;
        for (int a = na - 1; a >= 0; --a) {
            ksum += psi.grid.wavenumber((int)(q % n));
            q /= n;
        }
        out.amplitudes[p] *= std::polar(1.0, -ksum * dR);
    }
    fft.backward(out.amplitudes);
    return out;
}

namespace {

// weighted median of |k| over the spectral density of chi
double median_speed(const WaveFunction& chi) {
    FftEngine fft(chi.grid.fft_dims());
    std::vector<cdouble> hat = chi.amplitudes;
    fft.forward(hat);
    const int n = chi.grid.points_per_axis;
    std::vector<std::pair<double, double>> bins; // (|k|, weight)
    bins.reserve(hat.size());
    double total = 0.0;
    for (std::size_t p = 0; p < hat.size(); ++p) {
        const double w = std::norm(hat[p]);
        bins.emplace_back(std::abs(chi.grid.wavenumber((int)(p % (std::size_t)n))), w);
        total += w;
    }
    std::sort(bins.begin(), bins.end());
    double acc = 0.0;
    for (const auto& [k, w] : bins) {
        acc += w;
        if (acc >= 0.5 * total) return k;
    }
    return bins.back().first;
}

struct ScheduleOutcome {
    std::vector<cdouble> states; // accepted omega rows, m * nx
    double tau_used = 0.0;
    std::vector<double> cauchy, tail, tail_exponent; // per row
};

// Shared engine: m independent rows over one light axis, row-specific
// potential, Strang forward propagation under h, exact free back-map at the
// dyadic checkpoints.
ScheduleOutcome solve_schedule(const SpatialGrid& grid, std::vector<cdouble> rows, int m,
                               const std::vector<double>& pot, double alpha, double tol,
                               const WaveOperatorParams& prm, double tau0) {
    const int nx = grid.points_per_axis;
    const std::size_t total = (std::size_t)m * (std::size_t)nx;
    if (rows.size() != total || pot.size() != total)
        throw std::invalid_argument("solve_schedule: shape mismatch");

    const double l2w = grid.radial_mode() ? 2.0 * M_PI * grid.spacing() : grid.spacing();
    FftEngine fft({m, nx});

    std::vector<double> k2(nx);
    for (int i = 0; i < nx; ++i) {
        const double k = grid.wavenumber(i);
        k2[i] = 0.5 * k * k;
    }

    auto back_map = [&](double tau) {
        std::vector<cdouble> w = rows;
        fft.forward_axes(w, 1, 1);
        for (std::size_t p = 0; p < w.size(); ++p) w[p] *= std::polar(1.0, tau * k2[p % (std::size_t)nx]);
        fft.backward_axes(w, 1, 1);
        return w;
    };
    auto row_diff = [&](const std::vector<cdouble>& a, const std::vector<cdouble>& b, int j) {
        double s = 0.0;
        for (int i = 0; i < nx; ++i) s += std::norm(a[(std::size_t)j * nx + i] - b[(std::size_t)j * nx + i]);
        return std::sqrt(s * l2w);
    };

    // Duhamel integrand samples per row
    std::vector<std::vector<double>> g_t(m), g_v(m);
    auto sample_integrand = [&](double s) {
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int i = 0; i < nx; ++i) {
                const std::size_t p = (std::size_t)j * nx + i;
                acc += std::norm(pot[p] * rows[p]); // pot already carries alpha
            }
            g_t[j].push_back(s);
            g_v[j].push_back(std::sqrt(acc * l2w));
        }
    };

    std::vector<cdouble> expT(total), expV(total), expVh(total);
    auto run_leg = [&](double from, double to) {
        const long steps = std::max<long>(1, (long)std::llround((to - from) / prm.dt));
        const double dt = (to - from) / (double)steps;
        for (std::size_t p = 0; p < total; ++p) {
            expT[p] = std::polar(1.0, -dt * k2[p % (std::size_t)nx]);
            expV[p] = std::polar(1.0, -dt * pot[p]);
            expVh[p] = std::polar(1.0, -0.5 * dt * pot[p]);
        }
        const long sample_every = std::max<long>(1, steps / 24);
        for (std::size_t p = 0; p < total; ++p) rows[p] *= expVh[p];
        for (long s = 0; s < steps; ++s) {
            fft.forward_axes(rows, 1, 1);
            for (std::size_t p = 0; p < total; ++p) rows[p] *= expT[p];
            fft.backward_axes(rows, 1, 1);
            if (s + 1 < steps) {
                for (std::size_t p = 0; p < total; ++p) rows[p] *= expV[p];
            } else {
                for (std::size_t p = 0; p < total; ++p) rows[p] *= expVh[p];
            }
            // mid-leg states differ from psi(t) by a pure potential phase,
            // which leaves |pot * psi| unchanged
            if ((s + 1) % sample_every == 0 || s + 1 == steps) sample_integrand(from + (s + 1) * dt);
        }
    };

    auto boundary_check = [&](double tau) {
        const int cells = std::max(2, nx / 64);
        for (int j = 0; j < m; ++j) {
            double edge = 0.0, tot = 0.0;
            for (int i = 0; i < nx; ++i) {
                const double v = std::norm(rows[(std::size_t)j * nx + i]);
                tot += v;
                if (i < cells || i >= nx - cells) edge += v;
            }
            if (tot > 0.0 && edge / tot > prm.boundary_threshold) {
                char msg[200];
                std::snprintf(msg, sizeof msg,
                              "wave-operator solve: boundary mass %.2e at tau = %.3g before convergence; "
                              "enlarge half_width", edge / tot, tau);
                throw DomainEscapeError(msg);
            }
        }
    };

    // fit the integrand decay over [tau/2, tau] and integrate the power law
    auto measure_tail = [&](int j, double tau, double& exponent) -> double {
        std::vector<double> ts, vs;
        double gmax = 0.0;
        for (std::size_t i = 0; i < g_t[j].size(); ++i)
            if (g_t[j][i] >= 0.5 * tau && g_t[j][i] <= tau * (1.0 + 1e-12)) {
                gmax = std::max(gmax, g_v[j][i]);
                if (g_v[j][i] > 0.0) {
                    ts.push_back(g_t[j][i]);
                    vs.push_back(g_v[j][i]);
                }
            }
        if (gmax < 1e-15) {
            exponent = 0.0;
            return 0.0;
        }
        if (ts.size() < 4) {
            exponent = 0.0;
            return std::numeric_limits<double>::infinity();
        }
        const LineFit f = fit_power_law(ts, vs);
        exponent = -f.slope; // g ~ C s^{-p}
        if (exponent <= 1.05) return std::numeric_limits<double>::infinity();
        const double C = std::exp(f.intercept);
        return C * std::pow(tau, 1.0 - exponent) / (exponent - 1.0);
    };

    ScheduleOutcome out;
    out.cauchy.assign(m, 0.0);
    out.tail.assign(m, 0.0);
    out.tail_exponent.assign(m, 0.0);

    // alpha = 0: Omega_+ = I and the limit is reached identically
    if (alpha == 0.0) {
        out.states = rows;
        out.tau_used = tau0;
        return out;
    }

    double norm0 = 0.0;
    for (const auto& z : rows) norm0 += std::norm(z);

    std::vector<double> residual_history;
    double tau_prev = tau0;
    run_leg(0.0, tau0);
    boundary_check(tau0);
    std::vector<cdouble> omega_prev = back_map(tau0);

    while (2.0 * tau_prev <= prm.tau_max * (1.0 + 1e-12)) {
        const double tau_next = 2.0 * tau_prev;
        run_leg(tau_prev, tau_next);
        boundary_check(tau_next);
        std::vector<cdouble> omega_next = back_map(tau_next);

        double worst_cauchy = 0.0, worst_tail = 0.0;
        std::vector<double> cauchy(m), tail(m), texp(m);
        for (int j = 0; j < m; ++j) {
            cauchy[j] = row_diff(omega_next, omega_prev, j);
            tail[j] = measure_tail(j, tau_prev, texp[j]);
            worst_cauchy = std::max(worst_cauchy, cauchy[j]);
            worst_tail = std::max(worst_tail, tail[j]);
        }
        residual_history.push_back(worst_cauchy);

        if (worst_cauchy <= tol && worst_tail <= tol) {
            double norm1 = 0.0;
            for (const auto& z : rows) norm1 += std::norm(z);
            if (std::abs(std::sqrt(norm1) - std::sqrt(norm0)) > prm.unitarity_tolerance * std::max(1.0, std::sqrt(norm0)))
                throw UnitarityError("wave-operator solve: norm drift beyond tolerance");
            out.states = std::move(omega_prev);
            out.tau_used = tau_prev;
            out.cauchy = std::move(cauchy);
            out.tail = std::move(tail);
            out.tail_exponent = std::move(texp);
            return out;
        }
        omega_prev = std::move(omega_next);
        tau_prev = tau_next;
    }

    std::string hist = "wave-operator solve: no convergence up to tau_max; Cauchy residuals:";
    for (double r : residual_history) {
        char b[32];
        std::snprintf(b, sizeof b, " %.3e", r);
        hist += b;
    }
    throw ConvergenceError(hist);
}

std::vector<double> parametric_potential(const SpatialGrid& grid, const HamiltonianSpec& ham,
                                         const std::vector<double>& R) {
    HamiltonianSpec h = ham;
    h.kind = HamiltonianKind::light_parametric;
    h.heavy_positions = R;
    if (h.alpha == 0.0) return std::vector<double>(grid.total_points(), 0.0);
    return build_potential(grid, h);
}

double auto_tau0(const WaveFunction& chi, const HamiltonianSpec& ham, const WaveOperatorParams& prm) {
    if (prm.tau0 > 0.0) return prm.tau0;
    const double range = ham.pair_potential ? ham.pair_potential->range : 1.0;
    const double speed = std::max(median_speed(chi), 1e-3);
    return std::clamp(4.0 * range / speed, 1.0, 64.0);
}

} // namespace

WaveOperatorResult wave_operator_inverse(const WaveFunction& chi, const std::vector<double>& R,
                                         const HamiltonianSpec& ham, double tol,
                                         const WaveOperatorParams& params) {
    if (ham.pair_potential) ham.pair_potential->validate(); // sign constraint honored
    if (chi.grid.radial_mode())
        for (double r : R)
            if (r != 0.0) throw std::invalid_argument("wave_operator_inverse: radial mode requires R = 0");
    if (chi.grid.num_axes() != 1) throw std::invalid_argument("wave_operator_inverse: one light axis expected");

    const double tau0 = auto_tau0(chi, ham, params);
    std::vector<double> pot = parametric_potential(chi.grid, ham, R);
    ScheduleOutcome sol = solve_schedule(chi.grid, chi.amplitudes, 1, pot, ham.alpha, tol, params, tau0);

    WaveOperatorResult res;
    res.state = chi;
    res.state.amplitudes = std::move(sol.states);
    res.heavy_config = R;
    res.tau_used = sol.tau_used;
    res.cauchy_residual = sol.cauchy[0];
    res.duhamel_tail = sol.tail[0];
    res.tail_exponent = sol.tail_exponent[0];
    res.isometry_defect = std::abs(res.state.l2_norm() - chi.l2_norm());
    res.state.normalization = res.state.l2_norm();
    return res;
}

std::vector<WaveOperatorResult> wave_operator_field_1p(const WaveFunction& chi,
                                                       const std::vector<std::vector<double>>& R_grid,
                                                       const HamiltonianSpec& ham, double tol,
                                                       const WaveOperatorParams& params) {
    bool single_center = !chi.grid.radial_mode();
    for (const auto& R : R_grid) single_center = single_center && R.size() == 1;

    std::vector<WaveOperatorResult> out;
    out.reserve(R_grid.size());

    if (!single_center) {
        for (const auto& R : R_grid) out.push_back(wave_operator_inverse(chi, R, ham, tol, params));
        return out;
    }

    // K = 1: Omega_+(R)^{-1} chi = T_R Omega_+(0)^{-1} T_{-R} chi; all R share
    // the single solve at the origin, batched row-wise.
    const int m = (int)R_grid.size();
    const int nx = chi.grid.points_per_axis;
    std::vector<cdouble> rows((std::size_t)m * nx);
    for (int j = 0; j < m; ++j) {
        WaveFunction shifted = translate(chi, -R_grid[j][0]);
        std::copy(shifted.amplitudes.begin(), shifted.amplitudes.end(), rows.begin() + (std::size_t)j * nx);
    }
    std::vector<double> pot0 = parametric_potential(chi.grid, ham, {0.0});
    std::vector<double> pot((std::size_t)m * nx);
    for (int j = 0; j < m; ++j)
        std::copy(pot0.begin(), pot0.end(), pot.begin() + (std::size_t)j * nx);

    const double tau0 = auto_tau0(chi, ham, params);
    ScheduleOutcome sol = solve_schedule(chi.grid, std::move(rows), m, pot, ham.alpha, tol, params, tau0);

    const double chi_norm = chi.l2_norm();
    for (int j = 0; j < m; ++j) {
        WaveOperatorResult r;
        r.state = chi;
        std::copy(sol.states.begin() + (std::size_t)j * nx, sol.states.begin() + (std::size_t)(j + 1) * nx,
                  r.state.amplitudes.begin());
        r.state = translate(r.state, R_grid[j][0]);
        r.heavy_config = R_grid[j];
        r.tau_used = sol.tau_used;
        r.cauchy_residual = sol.cauchy[j];
        r.duhamel_tail = sol.tail[j];
        r.tail_exponent = sol.tail_exponent[j];
        r.isometry_defect = std::abs(r.state.l2_norm() - chi_norm);
        r.state.normalization = r.state.l2_norm();
        out.push_back(std::move(r));
    }
    return out;
}

std::map<std::vector<double>, std::vector<WaveOperatorResult>>
wave_operator_field(const std::vector<WaveFunction>& chi_list,
                    const std::vector<std::vector<double>>& R_grid, const HamiltonianSpec& ham,
                    double tol, const WaveOperatorParams& params) {
    std::map<std::vector<double>, std::vector<WaveOperatorResult>> out;
    for (const auto& chi : chi_list) {
        std::vector<WaveOperatorResult> field = wave_operator_field_1p(chi, R_grid, ham, tol, params);
        for (std::size_t i = 0; i < R_grid.size(); ++i) out[R_grid[i]].push_back(std::move(field[i]));
    }
    return out;
}

} // namespace hlsim

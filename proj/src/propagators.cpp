#include "hlsim/propagators.hpp"

#include <cmath>
#include <cstdio>

namespace hlsim {

void HamiltonianSpec::validate() const {
    if (kind == HamiltonianKind::joint) {
        if (!(epsilon > 0.0 && epsilon <= 1.0))
            throw std::invalid_argument("HamiltonianSpec: epsilon must lie in (0, 1]");
    }
    if (alpha < 0.0) throw std::invalid_argument("HamiltonianSpec: alpha must be >= 0");
    if (alpha > 0.0 && (kind == HamiltonianKind::light_parametric || kind == HamiltonianKind::joint)) {
        if (!pair_potential) throw std::invalid_argument("HamiltonianSpec: pair potential required");
    }
    if (kind == HamiltonianKind::light_parametric && heavy_positions.empty())
        throw std::invalid_argument("HamiltonianSpec: parametric kind needs heavy positions");
}

std::vector<double> build_kinetic(const SpatialGrid& grid, double heavy_coef, double light_coef) {
    const int na = grid.num_axes();
    const std::size_t n = (std::size_t)grid.points_per_axis;
    std::vector<double> kin(grid.total_points(), 0.0);
    for (std::size_t p = 0; p < kin.size(); ++p) {
        std::size_t q = p;
        double s = 0.0;
        for (int a = na - 1; a >= 0; --a) {
            const double k = grid.wavenumber((int)(q % n));
            q /= n;
            const double coef = grid.axes[a] == AxisRole::heavy ? heavy_coef : light_coef;
            s += coef * 0.5 * k * k;
        }
        kin[p] = s;
    }
    return kin;
}

std::vector<double> build_potential(const SpatialGrid& grid, const HamiltonianSpec& ham) {
    ham.validate();
    const int na = grid.num_axes();
    const std::size_t n = (std::size_t)grid.points_per_axis;
    std::vector<double> pot(grid.total_points(), 0.0);

    auto coords = [&](std::size_t p, std::vector<double>& x) {
        std::size_t q = p;
        for (int a = na - 1; a >= 0; --a) {
            x[a] = grid.coord((int)(q % n));
            q /= n;
        }
    };

    std::vector<double> x(na);
    switch (ham.kind) {
        case HamiltonianKind::free_light:
            break;
        case HamiltonianKind::light_parametric: {
            if (ham.alpha == 0.0 || !ham.pair_potential) break;
            const PotentialSpec& V = *ham.pair_potential;
            for (std::size_t p = 0; p < pot.size(); ++p) {
                coords(p, x);
                double s = 0.0;
                for (double R : ham.heavy_positions)
                    for (int a = 0; a < na; ++a) s += V(x[a] - R);
                pot[p] = ham.alpha * s;
            }
            break;
        }
        case HamiltonianKind::heavy: {
            if (!ham.heavy_potential) break;
            const PotentialSpec& U = *ham.heavy_potential;
            for (std::size_t p = 0; p < pot.size(); ++p) {
                coords(p, x);
                double s = 0.0;
                for (int a = 0; a < na; ++a)
                    if (grid.axes[a] == AxisRole::heavy) s += U(x[a]);
                pot[p] = s;
            }
            break;
        }
        case HamiltonianKind::joint: {
            const int kh = grid.axis_count(AxisRole::heavy);
            for (std::size_t p = 0; p < pot.size(); ++p) {
                coords(p, x);
                double s = 0.0;
                if (ham.heavy_potential)
                    for (int a = 0; a < kh; ++a) s += (*ham.heavy_potential)(x[a]);
                if (ham.alpha > 0.0 && ham.pair_potential) {
                    double v = 0.0;
                    for (int j = kh; j < na; ++j)
                        for (int l = 0; l < kh; ++l) v += (*ham.pair_potential)(x[j] - x[l]);
                    s += (ham.alpha / ham.epsilon) * v;
                }
                pot[p] = s;
            }
            break;
        }
    }
    return pot;
}

SplitPropagator::SplitPropagator(const SpatialGrid& grid, std::vector<double> kinetic,
                                 std::vector<double> potential, int kin_axis_first, int kin_axis_count)
    : grid_(grid), kinetic_(std::move(kinetic)), potential_(std::move(potential)),
      kin_first_(kin_axis_first), kin_count_(kin_axis_count) {
    if (kinetic_.size() != grid_.total_points() || potential_.size() != grid_.total_points())
        throw std::invalid_argument("SplitPropagator: array sizes must match the grid");
    has_potential_ = false;
    for (double v : potential_)
        if (v != 0.0) { has_potential_ = true; break; }
    fft_ = std::make_unique<FftEngine>(grid_.fft_dims());
}

SplitPropagator::~SplitPropagator() = default;

void SplitPropagator::refresh_tables(double dt) {
    if (dt == cached_dt_) return;
    const std::size_t n = kinetic_.size();
    expT_.resize(n);
    for (std::size_t p = 0; p < n; ++p) expT_[p] = std::polar(1.0, -dt * kinetic_[p]);
    if (has_potential_) {
        expV_.resize(n);
        expVhalf_.resize(n);
        for (std::size_t p = 0; p < n; ++p) {
            expV_[p] = std::polar(1.0, -dt * potential_[p]);
            expVhalf_[p] = std::polar(1.0, -0.5 * dt * potential_[p]);
        }
    }
    cached_dt_ = dt;
}

void SplitPropagator::advance(std::vector<cdouble>& a, double dt, long n_steps, double unitarity_tol) {
    if (n_steps <= 0) return;
    if (a.size() != kinetic_.size()) throw std::invalid_argument("SplitPropagator: state size mismatch");
    refresh_tables(dt);

    double norm0 = 0.0;
    for (const auto& z : a) norm0 += std::norm(z);
    norm0 = std::sqrt(norm0);

    auto mul = [&](const std::vector<cdouble>& m) {
        for (std::size_t p = 0; p < a.size(); ++p) a[p] *= m[p];
    };

    if (has_potential_) mul(expVhalf_);
    for (long s = 0; s < n_steps; ++s) {
        fft_->forward_axes(a, kin_first_, kin_count_);
        mul(expT_);
        fft_->backward_axes(a, kin_first_, kin_count_);
        if (has_potential_ && s + 1 < n_steps) mul(expV_);
    }
    if (has_potential_) mul(expVhalf_);

    double norm1 = 0.0;
    for (const auto& z : a) norm1 += std::norm(z);
    norm1 = std::sqrt(norm1);
    if (std::abs(norm1 - norm0) > unitarity_tol * std::max(1.0, norm0)) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "unitarity breach: |norm drift| = %.3e after %ld steps of dt = %.3e",
                      std::abs(norm1 - norm0), n_steps, dt);
        throw UnitarityError(msg);
    }
}

WaveFunction evolve_free(const WaveFunction& psi, double t) {
    WaveFunction out = psi;
    if (t == 0.0) return out;
    FftEngine fft(psi.grid.fft_dims());
    fft.forward(out.amplitudes);
    const std::vector<double> kin = build_kinetic(psi.grid, 1.0, 1.0);
    for (std::size_t p = 0; p < out.amplitudes.size(); ++p)
        out.amplitudes[p] *= std::polar(1.0, -t * kin[p]);
    fft.backward(out.amplitudes);
    return out;
}

namespace {
long step_count(double t, double dt) {
    const long n = (long)std::ceil(t / dt - 1e-9);
    return std::max<long>(n, 1);
}
} // namespace

WaveFunction evolve_split(const WaveFunction& psi, const HamiltonianSpec& ham, double t,
                          const EvolutionConfig& cfg) {
    cfg.validate();
    ham.validate();
    if (t < 0.0) throw std::invalid_argument("evolve_split: t must be >= 0");
    if (ham.kind == HamiltonianKind::free_light) return evolve_free(psi, t);
    if (t == 0.0) return psi;

    double heavy_coef = 1.0, light_coef = 1.0;
    int kin_count = psi.grid.num_axes(); // heavy axes lead, so a kinetic block always starts at 0
    if (ham.kind == HamiltonianKind::heavy) {
        kin_count = psi.grid.axis_count(AxisRole::heavy);
        if (kin_count == 0) throw std::invalid_argument("evolve_split: heavy kind needs heavy axes");
        light_coef = 0.0;
    } else if (ham.kind == HamiltonianKind::joint) {
        light_coef = 1.0 / ham.epsilon;
    }

    long n = step_count(t, cfg.dt);
    if (n > cfg.max_steps) throw std::invalid_argument("evolve_split: step budget exceeded");
    const double dt = t / (double)n;

    SplitPropagator prop(psi.grid, build_kinetic(psi.grid, heavy_coef, light_coef),
                         build_potential(psi.grid, ham), 0, kin_count);
    WaveFunction out = psi;
    prop.advance(out.amplitudes, dt, n, cfg.unitarity_tolerance);
    return out;
}

WaveFunction evolve_heavy_on_joint(const WaveFunction& psi, const HamiltonianSpec& heavy_ham,
                                   double t, const EvolutionConfig& cfg) {
    if (heavy_ham.kind != HamiltonianKind::heavy)
        throw std::invalid_argument("evolve_heavy_on_joint: heavy HamiltonianSpec required");
    if (t == 0.0) return psi;
    const int kh = psi.grid.axis_count(AxisRole::heavy);
    if (kh == 0) throw std::invalid_argument("evolve_heavy_on_joint: no heavy axes");

    // U = 0: exp(-itX0) is an exact spectral multiplier on the heavy axes.
    if (!heavy_ham.heavy_potential) {
        WaveFunction out = psi;
        FftEngine fft(psi.grid.fft_dims());
        fft.forward_axes(out.amplitudes, 0, kh);
        const std::vector<double> kin = build_kinetic(psi.grid, 1.0, 0.0);
        for (std::size_t p = 0; p < out.amplitudes.size(); ++p)
            out.amplitudes[p] *= std::polar(1.0, -t * kin[p]);
        fft.backward_axes(out.amplitudes, 0, kh);
        return out;
    }

    cfg.validate();
    long n = step_count(t, cfg.dt);
    const double dt = t / (double)n;
    SplitPropagator prop(psi.grid, build_kinetic(psi.grid, 1.0, 0.0),
                         build_potential(psi.grid, heavy_ham), 0, kh);
    WaveFunction out = psi;
    prop.advance(out.amplitudes, dt, n, cfg.unitarity_tolerance);
    return out;
}

double energy_expectation(const WaveFunction& psi, const HamiltonianSpec& ham) {
    double heavy_coef = 1.0, light_coef = 1.0;
    if (ham.kind == HamiltonianKind::heavy) light_coef = 0.0;
    if (ham.kind == HamiltonianKind::joint) light_coef = 1.0 / ham.epsilon;
    const std::vector<double> kin = build_kinetic(psi.grid, heavy_coef, light_coef);
    const std::vector<double> pot = build_potential(psi.grid, ham);

    std::vector<cdouble> hat = psi.amplitudes;
    FftEngine fft(psi.grid.fft_dims());
    fft.forward(hat);
    const double vol = psi.grid.cell_volume();
    const double n_total = (double)psi.grid.total_points();
    double e = 0.0;
    for (std::size_t p = 0; p < hat.size(); ++p) e += kin[p] * std::norm(hat[p]);
    e *= vol / n_total;
    for (std::size_t p = 0; p < pot.size(); ++p) e += pot[p] * std::norm(psi.amplitudes[p]) * vol;
    return e;
}

double self_convergence_error(const WaveFunction& psi, const HamiltonianSpec& ham, double t,
                              const EvolutionConfig& cfg) {
    WaveFunction a = evolve_split(psi, ham, t, cfg);
    EvolutionConfig half = cfg;
    half.dt = 0.5 * cfg.dt;
    WaveFunction b = evolve_split(psi, ham, t, half);
    double s = 0.0;
    for (std::size_t p = 0; p < a.amplitudes.size(); ++p) s += std::norm(a.amplitudes[p] - b.amplitudes[p]);
    return std::sqrt(s * a.grid.cell_volume());
}

} // namespace hlsim

#include "hlsim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace hlsim {

namespace {
bool power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }

// Mass fraction of a unit Gaussian beyond the domain edges of one axis.
double gaussian_tail_fraction(double half_width, double center, double width) {
    const double a = (half_width - center) / (std::sqrt(2.0) * width);
    const double b = (half_width + center) / (std::sqrt(2.0) * width);
    return 0.5 * (std::erfc(a) + std::erfc(b));
}
} // namespace

SpatialGrid SpatialGrid::line(int n, double half_width, std::vector<AxisRole> axes) {
    SpatialGrid g;
    g.dim = 1;
    g.points_per_axis = n;
    g.half_width = half_width;
    g.axes = std::move(axes);
    g.validate();
    return g;
}

SpatialGrid SpatialGrid::radial(int n, double half_width) {
    SpatialGrid g;
    g.dim = 3;
    g.points_per_axis = n;
    g.half_width = half_width;
    g.axes = {AxisRole::light};
    g.validate();
    return g;
}

void SpatialGrid::validate() const {
    if (dim != 1 && dim != 3) throw std::invalid_argument("SpatialGrid: dim must be 1 or 3 (radial)");
    if (!power_of_two(points_per_axis)) throw std::invalid_argument("SpatialGrid: points_per_axis must be a power of two");
    if (!(half_width > 0.0)) throw std::invalid_argument("SpatialGrid: half_width must be positive");
    if (axes.empty()) throw std::invalid_argument("SpatialGrid: no axes");
    if (dim == 3 && axes.size() != 1) throw std::invalid_argument("SpatialGrid: radial mode is single-axis");
    // heavy axes lead, light axes trail
    bool seen_light = false;
    for (AxisRole r : axes) {
        if (r == AxisRole::light) seen_light = true;
        else if (seen_light) throw std::invalid_argument("SpatialGrid: heavy axes must precede light axes");
    }
}

std::size_t SpatialGrid::total_points() const {
    std::size_t p = 1;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (p > (std::size_t(1) << 40) / (std::size_t)points_per_axis) {
            char msg[128];
            std::snprintf(msg, sizeof msg, "grid of %zu axes at %d points exceeds capacity", axes.size(), points_per_axis);
            throw CapacityError(msg);
        }
        p *= (std::size_t)points_per_axis;
    }
    return p;
}

double SpatialGrid::cell_volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < axes.size(); ++i) v *= spacing();
    return v;
}

int SpatialGrid::axis_count(AxisRole role) const {
    return (int)std::count(axes.begin(), axes.end(), role);
}

int SpatialGrid::first_light_axis() const { return axis_count(AxisRole::heavy); }

double WaveFunction::l2_norm() const {
    double s = 0.0;
    if (grid.radial_mode()) {
        const double dx = grid.spacing();
        for (const auto& z : amplitudes) s += std::norm(z);
        return std::sqrt(2.0 * M_PI * s * dx);
    }
    for (const auto& z : amplitudes) s += std::norm(z);
    return std::sqrt(s * grid.cell_volume());
}

void WaveFunction::normalize() {
    const double n = l2_norm();
    if (n == 0.0) throw std::runtime_error("normalize: zero state");
    for (auto& z : amplitudes) z /= n;
    normalization = 1.0;
}

WaveFunction make_gaussian(const SpatialGrid& grid, const PacketSpec& packet) {
    const int na = grid.num_axes();
    if (!(packet.width > 0.0)) throw std::invalid_argument("make_gaussian: width must be positive");
    if ((int)packet.center.size() != na || (int)packet.momentum.size() != na)
        throw std::invalid_argument("make_gaussian: center/momentum size must match axis count");

    double tail = 0.0;
    for (int a = 0; a < na; ++a)
        tail += gaussian_tail_fraction(grid.half_width, grid.radial_mode() ? 0.0 : packet.center[a], packet.width);
    if (tail > 1e-8) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "make_gaussian: boundary tail mass %.3e exceeds 1e-8 (aliasing hazard); enlarge half_width", tail);
        throw std::invalid_argument(msg);
    }

    WaveFunction psi(grid);
    const int n = grid.points_per_axis;
    if (grid.radial_mode()) {
        const double w2 = packet.width * packet.width;
        for (int i = 0; i < n; ++i) {
            const double x = grid.coord(i);
            psi.amplitudes[i] = x * std::exp(-x * x / (2.0 * w2)); // u = r g(r), odd
        }
    } else {
        // separable product over axes
        std::vector<std::vector<cdouble>> axis_factor(na, std::vector<cdouble>(n));
        for (int a = 0; a < na; ++a)
            for (int i = 0; i < n; ++i) {
                const double x = grid.coord(i);
                const double d = x - packet.center[a];
                axis_factor[a][i] = std::exp(cdouble(-d * d / (2.0 * packet.width * packet.width),
                                                     packet.momentum[a] * x));
            }
        std::vector<int> idx(na, 0);
        for (std::size_t p = 0; p < psi.amplitudes.size(); ++p) {
            std::size_t q = p;
            cdouble v(1.0, 0.0);
            for (int a = na - 1; a >= 0; --a) {
                v *= axis_factor[a][q % n];
                q /= n;
            }
            psi.amplitudes[p] = v;
        }
    }
    psi.normalize();
    return psi;
}

namespace {

// Enumerate multi-indices gamma over `na` axes with |gamma| <= m, |gamma| >= 1.
void multi_indices(int na, int m, std::vector<std::vector<int>>& out) {
    std::vector<int> g(na, 0);
    while (true) {
        int i = 0;
        for (; i < na; ++i) {
            ++g[i];
            if (std::accumulate(g.begin(), g.end(), 0) <= m) break;
            g[i] = 0;
        }
        if (i == na) return;
        out.push_back(g);
    }
}

} // namespace

NormReport norms(const WaveFunction& psi, const std::vector<int>& orders,
                 const std::vector<std::pair<int, int>>& weights) {
    for (int m : orders)
        if (m < 0 || m > 4) throw std::invalid_argument("norms: Sobolev orders limited to 0..4");

    NormReport rep;
    const SpatialGrid& g = psi.grid;
    const int n = g.points_per_axis;
    const int na = g.num_axes();
    const double dx = g.spacing();

    if (g.radial_mode()) {
        double s1 = 0.0, s2 = 0.0, sinf = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = g.coord(i);
            const double a = std::abs(psi.amplitudes[i]);
            s1 += a * std::abs(x);
            s2 += a * a;
            if (x != 0.0) sinf = std::max(sinf, a / std::abs(x));
        }
        rep.l1 = 2.0 * M_PI * s1 * dx;
        rep.l2 = std::sqrt(2.0 * M_PI * s2 * dx);
        rep.linf = sinf;
        if (!orders.empty() || !weights.empty())
            throw std::invalid_argument("norms: Sobolev/weighted norms unsupported in radial mode");
        return rep;
    }

    const double vol = g.cell_volume();
    double s1 = 0.0, s2 = 0.0, sinf = 0.0;
    for (const auto& z : psi.amplitudes) {
        const double a = std::abs(z);
        s1 += a;
        s2 += a * a;
        sinf = std::max(sinf, a);
    }
    rep.l1 = s1 * vol;
    rep.l2 = std::sqrt(s2 * vol);
    rep.linf = sinf;

    const bool need_fourier = !orders.empty() || !weights.empty() || true; // tail diagnostic always
    if (need_fourier) {
        FftEngine fft(g.fft_dims());
        std::vector<cdouble> hat = psi.amplitudes;
        fft.forward(hat);
        // unitary normalization: |hat|^2 * dk_vol sums to ||psi||_2^2
        double fac = 1.0;
        for (int a = 0; a < na; ++a) fac *= dx / std::sqrt(2.0 * M_PI);
        double dk_vol = 1.0;
        for (int a = 0; a < na; ++a) dk_vol *= 2.0 * M_PI / (2.0 * g.half_width);

        const double k_nyq = M_PI / dx;
        double tail_energy = 0.0, total_energy = 0.0;
        std::vector<double> k2(psi.amplitudes.size(), 0.0);
        std::vector<double> kmaxfrac(psi.amplitudes.size(), 0.0);
        for (std::size_t p = 0; p < hat.size(); ++p) {
            std::size_t q = p;
            double kk = 0.0, kf = 0.0;
            for (int a = na - 1; a >= 0; --a) {
                const double k = g.wavenumber((int)(q % (std::size_t)n));
                q /= (std::size_t)n;
                kk += k * k;
                kf = std::max(kf, std::abs(k) / k_nyq);
            }
            k2[p] = kk;
            kmaxfrac[p] = kf;
            const double e = std::norm(hat[p]);
            total_energy += e;
            if (kf > 0.75) tail_energy += e;
        }
        rep.spectral_tail_fraction = total_energy > 0.0 ? tail_energy / total_energy : 0.0;
        rep.under_resolved = rep.spectral_tail_fraction > 1e-6;

        for (int m : orders) {
            double s = 0.0;
            for (std::size_t p = 0; p < hat.size(); ++p)
                s += std::pow(1.0 + k2[p], (double)m) * std::norm(hat[p]);
            rep.sobolev[m] = std::sqrt(s * fac * fac * dk_vol);
        }

        if (!weights.empty()) {
            // position weights <x>^n with |x|^2 summed over axes
            std::vector<double> x2(psi.amplitudes.size(), 0.0);
            for (std::size_t p = 0; p < x2.size(); ++p) {
                std::size_t q = p;
                double s = 0.0;
                for (int a = na - 1; a >= 0; --a) {
                    const double x = g.coord((int)(q % (std::size_t)n));
                    q /= (std::size_t)n;
                    s += x * x;
                }
                x2[p] = s;
            }
            std::vector<std::vector<int>> gammas;
            for (const auto& [m, nw] : weights) {
                if (m < 0 || m > 4) throw std::invalid_argument("norms: weighted orders limited to 0..4");
                gammas.clear();
                multi_indices(na, m, gammas);
                // |gamma| = 0 term
                double total = 0.0;
                {
                    double s = 0.0;
                    for (std::size_t p = 0; p < psi.amplitudes.size(); ++p)
                        s += std::pow(1.0 + x2[p], (double)nw) * std::norm(psi.amplitudes[p]);
                    total += std::sqrt(s * vol);
                }
                std::vector<cdouble> work;
                for (const auto& gamma : gammas) {
                    work = hat;
                    for (std::size_t p = 0; p < work.size(); ++p) {
                        std::size_t q = p;
                        cdouble mult(1.0, 0.0);
                        for (int a = na - 1; a >= 0; --a) {
                            const double k = g.wavenumber((int)(q % (std::size_t)n));
                            q /= (std::size_t)n;
                            for (int r = 0; r < gamma[a]; ++r) mult *= cdouble(0.0, k);
                        }
                        work[p] *= mult;
                    }
                    fft.backward(work);
                    double s = 0.0;
                    for (std::size_t p = 0; p < work.size(); ++p)
                        s += std::pow(1.0 + x2[p], (double)nw) * std::norm(work[p]);
                    total += std::sqrt(s * vol);
                }
                rep.weighted[{m, nw}] = total;
            }
        }
    }
    return rep;
}

cdouble inner_product(const WaveFunction& a, const WaveFunction& b) {
    if (!(a.grid == b.grid)) throw GridMismatchError("inner_product: grid mismatch");
    cdouble s(0.0, 0.0);
    for (std::size_t p = 0; p < a.amplitudes.size(); ++p)
        s += std::conj(a.amplitudes[p]) * b.amplitudes[p];
    if (a.grid.radial_mode()) return s * (2.0 * M_PI * a.grid.spacing());
    return s * a.grid.cell_volume();
}

WaveFunction tensor_product(const std::vector<WaveFunction>& parts) {
    if (parts.empty()) throw std::invalid_argument("tensor_product: no parts");
    if (parts.size() == 1) return parts[0];
    const SpatialGrid& g0 = parts[0].grid;
    SpatialGrid joint;
    joint.dim = 1;
    joint.points_per_axis = g0.points_per_axis;
    joint.half_width = g0.half_width;
    for (const auto& p : parts) {
        if (p.grid.radial_mode()) throw std::invalid_argument("tensor_product: radial parts unsupported");
        if (p.grid.points_per_axis != g0.points_per_axis || p.grid.half_width != g0.half_width)
            throw GridMismatchError("tensor_product: parts must share grid parameters");
        joint.axes.insert(joint.axes.end(), p.grid.axes.begin(), p.grid.axes.end());
    }
    joint.validate();

    const std::size_t total = joint.total_points(); // throws CapacityError on overflow
    if (total > (std::size_t(1) << 27)) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "tensor_product: %zu points (%.1f GiB) exceeds the 2 GiB budget",
                      total, (double)total * sizeof(cdouble) / (1 << 30));
        throw CapacityError(msg);
    }

    WaveFunction out(joint);
    for (std::size_t p = 0; p < total; ++p) {
        cdouble v(1.0, 0.0);
        std::size_t q = p;
        for (int pi = (int)parts.size() - 1; pi >= 0; --pi) {
            const std::size_t sz = parts[pi].amplitudes.size();
            v *= parts[pi].amplitudes[q % sz];
            q /= sz;
        }
        out.amplitudes[p] = v;
    }
    out.normalization = out.l2_norm();
    return out;
}

std::vector<double> marginal_density(const WaveFunction& psi, int axis) {
    const SpatialGrid& g = psi.grid;
    const int na = g.num_axes();
    if (axis < 0 || axis >= na) throw std::invalid_argument("marginal_density: bad axis");
    const std::size_t n = (std::size_t)g.points_per_axis;
    std::vector<double> rho(n, 0.0);
    std::size_t after = 1;
    for (int a = axis + 1; a < na; ++a) after *= n;
    const double w = g.cell_volume() / g.spacing();
    for (std::size_t p = 0; p < psi.amplitudes.size(); ++p) {
        const std::size_t i = (p / after) % n;
        rho[i] += std::norm(psi.amplitudes[p]) * w;
    }
    return rho;
}

double boundary_mass_fraction(const WaveFunction& psi, int cells) {
    const SpatialGrid& g = psi.grid;
    const int na = g.num_axes();
    const std::size_t n = (std::size_t)g.points_per_axis;
    double edge = 0.0, total = 0.0;
    for (std::size_t p = 0; p < psi.amplitudes.size(); ++p) {
        const double m = std::norm(psi.amplitudes[p]);
        total += m;
        std::size_t q = p;
        for (int a = na - 1; a >= 0; --a) {
            const std::size_t i = q % n;
            q /= n;
            // Boundary of [-L, L): lowest cells (x ~ -L) and highest cells (x ~ +L).
            if (i < (std::size_t)cells || i >= n - (std::size_t)cells) {
                edge += m;
                break;
            }
        }
    }
    return total > 0.0 ? edge / total : 0.0;
}

} // namespace hlsim

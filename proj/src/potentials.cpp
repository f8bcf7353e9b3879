#include "hlsim/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>

#include "hlsim/fft.hpp"

namespace hlsim {

double rollnik_bound_constant() { return std::sqrt(3.0) * std::pow(2.0 * M_PI, 1.0 / 3.0); }
double kato_bound_constant() { return 3.0 * std::pow(M_PI, 1.0 / 3.0); }

PotentialFamily potential_family_from_string(const std::string& s) {
    if (s == "gaussian") return PotentialFamily::gaussian;
    if (s == "exponential") return PotentialFamily::exponential;
    if (s == "sech_squared") return PotentialFamily::sech_squared;
    if (s == "compact_bump") return PotentialFamily::compact_bump;
    throw std::invalid_argument("unknown potential family: " + s);
}

std::string to_string(PotentialFamily f) {
    switch (f) {
        case PotentialFamily::gaussian: return "gaussian";
        case PotentialFamily::exponential: return "exponential";
        case PotentialFamily::sech_squared: return "sech_squared";
        case PotentialFamily::compact_bump: return "compact_bump";
    }
    return "?";
}

void PotentialSpec::validate() const {
    if (!(range > 0.0)) throw std::invalid_argument("PotentialSpec: range must be positive");
    if (repulsive_required && !(amplitude > 0.0))
        throw std::invalid_argument("PotentialSpec: repulsive potential required (V >= 0), amplitude must be positive");
}

namespace {

constexpr int kMaxDeriv = 8;

// ---- derivative term algebras (profiles are even and smooth) -------------

// polynomial in one variable, coefficient vector by power
using Poly = std::vector<double>;

Poly poly_derivative(const Poly& p) {
    Poly d(p.size() > 1 ? p.size() - 1 : 1, 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * (double)i;
    return d;
}

double poly_eval(const Poly& p, double x) {
    double v = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) v = v * x + p[i];
    return v;
}

// gaussian: d^m/du^m e^{-u^2} = P_m(u) e^{-u^2},  P_{m+1} = P_m' - 2u P_m
const std::vector<Poly>& gaussian_polys() {
    static const std::vector<Poly> tab = [] {
        std::vector<Poly> t;
        t.push_back({1.0});
        for (int m = 0; m < kMaxDeriv; ++m) {
            Poly next = poly_derivative(t.back());
            next.resize(std::max(next.size(), t.back().size() + 1), 0.0);
            for (std::size_t i = 0; i < t.back().size(); ++i) next[i + 1] -= 2.0 * t.back()[i];
            t.push_back(next);
        }
        return t;
    }();
    return tab;
}

// sech^2: d^m/du^m sech^2(u) = Q_m(tanh u),  Q_0 = 1 - T^2,  Q_{m+1} = (1-T^2) Q_m'
const std::vector<Poly>& sech2_polys() {
    static const std::vector<Poly> tab = [] {
        std::vector<Poly> t;
        t.push_back({1.0, 0.0, -1.0});
        for (int m = 0; m < kMaxDeriv; ++m) {
            Poly d = poly_derivative(t.back());
            Poly next(d.size() + 2, 0.0);
            for (std::size_t i = 0; i < d.size(); ++i) {
                next[i] += d[i];
                next[i + 2] -= d[i];
            }
            t.push_back(next);
        }
        return t;
    }();
    return tab;
}

// generic two-exponent term algebra  sum c * u^p * X^{-q} * E(u)
struct Term {
    int p, q;
    double c;
};
using Terms = std::vector<Term>;

void add_term(Terms& t, int p, int q, double c) {
    if (c == 0.0) return;
    for (auto& e : t)
        if (e.p == p && e.q == q) {
            e.c += c;
            return;
        }
    t.push_back({p, q, c});
}

// exponential: f = e^{1-w}, w = sqrt(1+u^2).  Term c u^p w^{-q} f:
//   d/du -> { c p u^{p-1} w^{-q},  -c q u^{p+1} w^{-q-2},  -c u^{p+1} w^{-q-1} }
const std::vector<Terms>& exponential_terms() {
    static const std::vector<Terms> tab = [] {
        std::vector<Terms> t;
        t.push_back({{0, 0, 1.0}});
        for (int m = 0; m < kMaxDeriv; ++m) {
            Terms next;
            for (const auto& e : t.back()) {
                if (e.p > 0) add_term(next, e.p - 1, e.q, e.c * e.p);
                add_term(next, e.p + 1, e.q + 2, -e.c * e.q);
                add_term(next, e.p + 1, e.q + 1, -e.c);
            }
            t.push_back(next);
        }
        return t;
    }();
    return tab;
}

// bump: f = e^{1 - 1/y}, y = 1-u^2.  Term c u^p y^{-q} f:
//   d/du -> { c p u^{p-1} y^{-q},  2 c q u^{p+1} y^{-q-1},  -2 c u^{p+1} y^{-q-2} }
const std::vector<Terms>& bump_terms() {
    static const std::vector<Terms> tab = [] {
        std::vector<Terms> t;
        t.push_back({{0, 0, 1.0}});
        for (int m = 0; m < kMaxDeriv; ++m) {
            Terms next;
            for (const auto& e : t.back()) {
                if (e.p > 0) add_term(next, e.p - 1, e.q, e.c * e.p);
                add_term(next, e.p + 1, e.q + 1, 2.0 * e.c * e.q);
                add_term(next, e.p + 1, e.q + 2, -2.0 * e.c);
            }
            t.push_back(next);
        }
        return t;
    }();
    return tab;
}

double profile_value(PotentialFamily f, double u) {
    u = std::abs(u);
    switch (f) {
        case PotentialFamily::gaussian: return std::exp(-u * u);
        case PotentialFamily::exponential: return std::exp(1.0 - std::sqrt(1.0 + u * u));
        case PotentialFamily::sech_squared: {
            const double c = std::cosh(u);
            return 1.0 / (c * c);
        }
        case PotentialFamily::compact_bump:
            if (u >= 1.0) return 0.0;
            return std::exp(1.0 - 1.0 / (1.0 - u * u));
    }
    return 0.0;
}

double profile_derivative(PotentialFamily f, int m, double u) {
    switch (f) {
        case PotentialFamily::gaussian:
            return poly_eval(gaussian_polys()[m], u) * std::exp(-u * u);
        case PotentialFamily::sech_squared:
            return poly_eval(sech2_polys()[m], std::tanh(u));
        case PotentialFamily::exponential: {
            const double w = std::sqrt(1.0 + u * u);
            double s = 0.0;
            for (const auto& e : exponential_terms()[m])
                s += e.c * std::pow(u, e.p) * std::pow(w, -e.q);
            return s * std::exp(1.0 - w);
        }
        case PotentialFamily::compact_bump: {
            if (u >= 1.0) return 0.0;
            const double y = 1.0 - u * u;
            const double ly = std::log(y);
            double s = 0.0;
            for (const auto& e : bump_terms()[m]) {
                const double arg = 1.0 - 1.0 / y - e.q * ly;
                if (arg < -700.0) continue;
                s += e.c * std::pow(u, e.p) * std::exp(arg);
            }
            return s;
        }
    }
    return 0.0;
}

double support_radius_of(PotentialFamily f, double a) {
    switch (f) {
        case PotentialFamily::gaussian: return 9.0 * a;
        case PotentialFamily::exponential: return 60.0 * a;
        case PotentialFamily::sech_squared: return 32.0 * a;
        case PotentialFamily::compact_bump: return a;
    }
    return 10.0 * a;
}

double trapezoid(const std::function<double(double)>& f, double R, int n) {
    const double h = R / n;
    double s = 0.5 * (f(0.0) + f(R));
    for (int i = 1; i < n; ++i) s += f(i * h);
    return s * h;
}

// ---- Rollnik double integral via log-kernel product integration ----------

// g(m) = int_{-1}^{1} (1-|xi|) ln|xi - m| dxi, hat-function moment of ln.
double hat_log_moment(double m) {
    // int (alpha + beta*xi) ln|xi - m| dxi over [lo, hi]
    auto seg = [m](double alpha, double beta, double lo, double hi) {
        auto F = [&](double xi) {
            const double s = xi - m;
            const double l = (s == 0.0) ? 0.0 : std::log(std::abs(s));
            return (alpha + beta * m) * (s * l - s) + beta * (0.5 * s * s * l - 0.25 * s * s);
        };
        return F(hi) - F(lo);
    };
    return seg(1.0, 1.0, -1.0, 0.0) + seg(1.0, -1.0, 0.0, 1.0);
}

double rollnik_norm(const PotentialSpec& spec, int n) {
    const double R = spec.support_radius();
    const double h = R / n;
    std::vector<double> w(n, 0.0);
    for (int j = 0; j < n; ++j) {
        const double r = j * h;
        w[j] = std::abs(spec(r)) * r;
    }
    // circular convolution X[m] = sum_k w_k g(m-k) over length N = 4n
    const int N = 4 * n;
    std::vector<cdouble> wf(N, 0.0), gf(N, 0.0);
    for (int j = 0; j < n; ++j) wf[j] = w[j];
    for (int m = -2 * n; m < 2 * n; ++m) gf[(m + N) % N] = hat_log_moment((double)m);
    FftEngine fft({N});
    fft.forward(wf);
    fft.forward(gf);
    for (int i = 0; i < N; ++i) wf[i] *= gf[i];
    fft.backward(wf);
    // F_j = int w(s) [ln(s+r_j) - ln|s-r_j|] ds = h [X(-j) - X(j)]
    double total = 0.0;
    for (int j = 1; j < n; ++j) {
        const double F = h * (wf[(N - j) % N].real() - wf[j].real());
        total += w[j] * F * h;
    }
    return std::sqrt(std::max(0.0, 8.0 * M_PI * M_PI * total));
}

// ---- H^gamma via radial sine transform (odd-extension FFT) ---------------

struct SineTransformParams {
    int samples;   // nodes over [0, R]
    int fft_len;   // padded length (power of two)
    double k_max;  // integration cutoff
};

SineTransformParams sine_params(const PotentialSpec& spec) {
    const double a = spec.range;
    switch (spec.family) {
        case PotentialFamily::gaussian: return {1 << 15, 1 << 19, 24.0 / a};
        case PotentialFamily::exponential: return {1 << 16, 1 << 19, 48.0 / a};
        case PotentialFamily::sech_squared: return {1 << 16, 1 << 19, 32.0 / a};
        case PotentialFamily::compact_bump: return {1 << 17, 1 << 22, 3200.0 / a};
    }
    return {1 << 15, 1 << 19, 32.0 / a};
}

std::map<int, double> h_gamma_norms(const PotentialSpec& spec, int max_gamma, int scale) {
    SineTransformParams sp = sine_params(spec);
    sp.samples *= scale;
    sp.fft_len *= scale;
    const double R = spec.support_radius();
    const double h = R / sp.samples;
    const int N = sp.fft_len;

    std::vector<cdouble> arr(N, 0.0);
    for (int j = 1; j < sp.samples; ++j) {
        const double r = j * h;
        const double wj = spec(r) * r;
        arr[j] = wj;
        arr[N - j] = -wj;
    }
    FftEngine fft({N});
    fft.forward(arr);

    // S(k_m) = -Im X_m * h / 2,  k_m = 2 pi m / (N h);
    // ||V||_{H^g}^2 = 8 * int (1+k^2)^g S(k)^2 dk
    const double dk = 2.0 * M_PI / (N * h);
    const int m_max = std::min(N / 2 - 1, (int)(sp.k_max / dk));
    std::vector<double> acc(max_gamma + 1, 0.0);
    for (int m = 1; m <= m_max; ++m) {
        const double k = m * dk;
        const double S = -0.5 * arr[m].imag() * h;
        double base = S * S;
        const double onek2 = 1.0 + k * k;
        for (int g = 0; g <= max_gamma; ++g) {
            acc[g] += base;
            base *= onek2;
        }
    }
    std::map<int, double> out;
    for (int g = 0; g <= max_gamma; ++g) out[g] = std::sqrt(8.0 * acc[g] * dk);
    return out;
}

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::runtime_error(std::string("potential_norms: non-integrable result for ") + what);
}

} // namespace

double PotentialSpec::operator()(double r) const {
    return amplitude * profile_value(family, r / range);
}

double PotentialSpec::radial_derivative(int m, double r) const {
    if (m < 0 || m > kMaxDeriv) throw std::invalid_argument("radial_derivative: order out of range");
    if (m == 0) return (*this)(r);
    return amplitude * profile_derivative(family, m, std::abs(r) / range) / std::pow(range, m);
}

double PotentialSpec::support_radius() const { return support_radius_of(family, range); }

PotentialNorms potential_norms(const PotentialSpec& spec, int max_gamma, const QuadratureParams& qp) {
    spec.validate();
    PotentialNorms out;
    const double R = spec.support_radius();
    const int n = qp.radial_points;

    out.l1 = 4.0 * M_PI * trapezoid([&](double r) { return std::abs(spec(r)) * r * r; }, R, n);
    out.l2 = std::sqrt(4.0 * M_PI * trapezoid([&](double r) { const double v = spec(r); return v * v * r * r; }, R, n));
    out.kato = 4.0 * M_PI * trapezoid([&](double r) { return std::abs(spec(r)) * r; }, R, n);
    out.rollnik = rollnik_norm(spec, qp.rollnik_points);

    // W^{gamma,1}: cumulative sum of radial-derivative L1 norms (radial
    // Sobolev convention; the spec's families are all radial).
    double acc = 0.0;
    for (int m = 0; m <= max_gamma; ++m) {
        acc += 4.0 * M_PI *
               trapezoid([&](double r) { return std::abs(spec.radial_derivative(m, r)) * r * r; }, R, n);
        out.sobolev_w_gamma_1[m] = acc;
    }

    out.sobolev_h_gamma = h_gamma_norms(spec, max_gamma, qp.radial_points >= (2 << 20) ? 2 : 1);

    check_finite(out.l1, "L1");
    check_finite(out.l2, "L2");
    check_finite(out.kato, "Kato");
    check_finite(out.rollnik, "Rollnik");
    for (const auto& [g, v] : out.sobolev_w_gamma_1) check_finite(v, "W^{gamma,1}");
    for (const auto& [g, v] : out.sobolev_h_gamma) check_finite(v, "H^gamma");
    return out;
}

double kato_integral_at(const PotentialSpec& spec, double x, const QuadratureParams& qp) {
    const double R = spec.support_radius();
    const int n = qp.radial_points;
    if (x <= 0.0) return 4.0 * M_PI * trapezoid([&](double r) { return std::abs(spec(r)) * r; }, R, n);
    // spherical average of 1/|x-y| is 1/max(|x|,|y|)
    const double inner = trapezoid([&](double r) { return std::abs(spec(r)) * r * r; }, std::min(x, R), n);
    double outer = 0.0;
    if (x < R)
        outer = trapezoid([&](double s) { return std::abs(spec(x + s)) * (x + s); }, R - x, n);
    return 4.0 * M_PI * (inner / x + outer);
}

double alpha_star_from_norms(int K, int gamma, double w_gamma_1, double h_gamma) {
    if (K < 1) throw std::invalid_argument("alpha_star_from_norms: K >= 1 required");
    const double prefactor = std::pow(M_PI, 2.0 / 3.0) / (3.0 * std::pow(2.0, gamma - 1) * K);
    return prefactor * std::pow(w_gamma_1, -1.0 / 3.0) * std::pow(h_gamma, -2.0 / 3.0);
}

SmallnessReport smallness_thresholds(const PotentialSpec& spec, int K, double alpha,
                                     const QuadratureParams& qp) {
    const PotentialNorms n = potential_norms(spec, 4, qp);
    SmallnessReport rep;
    rep.alpha = alpha;
    for (int g = 0; g <= 4; ++g)
        rep.alpha_star_gamma[g] =
            alpha_star_from_norms(K, g, n.sobolev_w_gamma_1.at(g), n.sobolev_h_gamma.at(g));
    rep.alpha_star = rep.alpha_star_gamma.at(4);
    rep.admissible = alpha < rep.alpha_star;
    return rep;
}

double born_c0_from_ratio(double q) {
    if (!(q < 1.0)) {
        char msg[128];
        std::snprintf(msg, sizeof msg, "Born series diverges: alpha ||V||_K / (2 pi) = %.6g >= 1", q);
        throw DivergenceError(msg);
    }
    // sum (l+1) q^l = (1-q)^{-2}
    return (1.0 / (2.0 * M_PI)) / ((1.0 - q) * (1.0 - q));
}

namespace {
// sum_{l>=1} (l+1) l^gamma r^l with relative tail below 1e-12
double series_l_plus_one_l_gamma(int gamma, double r) {
    double sum = 0.0;
    double rl = 1.0;
    for (long l = 1; l <= 100000000L; ++l) {
        rl *= r;
        const double term = (double)(l + 1) * std::pow((double)l, (double)gamma) * rl;
        sum += term;
        if (l > 4 && term < 1e-13 * std::max(sum, 1.0) && r < 0.999999) {
            // geometric tail bound
            if (term * r / (1.0 - r) < 1e-12 * std::max(sum, 1.0)) break;
        }
    }
    return sum;
}

double series_l_gamma(int gamma, double b) {
    double sum = 0.0;
    double bl = 1.0;
    for (long l = 1; l <= 100000000L; ++l) {
        bl *= b;
        const double term = std::pow((double)l, (double)gamma) * bl;
        sum += term;
        if (l > 4 && term < 1e-13 * std::max(sum, 1.0) && b < 0.999999) {
            if (term * b / (1.0 - b) < 1e-12 * std::max(sum, 1.0)) break;
        }
    }
    return sum;
}
} // namespace

BornConstants born_constants(const PotentialSpec& spec, int K, double alpha,
                             const std::vector<int>& gammas, int N, const QuadratureParams& qp) {
    int max_gamma = 0;
    for (int g : gammas) {
        if (g < 0 || g > 4) throw std::invalid_argument("born_constants: gamma out of range 0..4");
        max_gamma = std::max(max_gamma, g);
    }
    const PotentialNorms n = potential_norms(spec, max_gamma, qp);

    BornConstants bc;
    bc.c_eta_convention = 1.0;
    const double q = alpha * n.kato / (2.0 * M_PI);
    bc.c0 = born_c0_from_ratio(q);
    bc.a_gamma[0] = 1.0;

    const double c1 = rollnik_bound_constant();
    for (int g : gammas) {
        if (g == 0) {
            // l = 0 convention 0^0 := 1, so the gamma = 0 series is the c0 series
            bc.c_gamma[0] = bc.c0;
        } else {
            const double astar = alpha_star_from_norms(K, g, n.sobolev_w_gamma_1.at(g), n.sobolev_h_gamma.at(g));
            const double r = alpha / astar;
            if (!(r < 1.0)) {
                char msg[160];
                std::snprintf(msg, sizeof msg,
                              "Born series diverges: alpha = %.6g >= alpha*_%d = %.6g", alpha, g, astar);
                throw DivergenceError(msg);
            }
            bc.c_gamma[g] = (1.0 / (2.0 * M_PI)) * (1.0 + series_l_plus_one_l_gamma(g, r));
        }
        if (g >= 1) {
            const double b = alpha * K * c1 *
                             std::pow(n.sobolev_w_gamma_1.at(g), 1.0 / 3.0) *
                             std::pow(n.sobolev_h_gamma.at(g), 2.0 / 3.0) / (2.0 * M_PI);
            bc.a_gamma[g] = c1 * series_l_gamma(g, b); // b < alpha/alpha*_g < 1
        }
        double best = 1.0; // lambda = 0 term: N^0 a_0^0
        for (int lam = 1; lam <= g; ++lam) {
            if (!bc.a_gamma.count(lam)) {
                const double b = alpha * K * c1 *
                                 std::pow(n.sobolev_w_gamma_1.at(lam), 1.0 / 3.0) *
                                 std::pow(n.sobolev_h_gamma.at(lam), 2.0 / 3.0) / (2.0 * M_PI);
                bc.a_gamma[lam] = c1 * series_l_gamma(lam, b);
            }
            best = std::max(best, std::pow((double)N, lam) * std::pow(bc.a_gamma.at(lam), lam));
        }
        bc.c_hat_gamma[g] = best;
    }
    return bc;
}

} // namespace hlsim

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "hlsim/potentials.hpp"

using namespace hlsim;

namespace {

PotentialSpec unit_gaussian() { return {PotentialFamily::gaussian, 1.0, 1.0, true}; }

const std::vector<PotentialFamily> all_families = {
    PotentialFamily::gaussian, PotentialFamily::exponential, PotentialFamily::sech_squared,
    PotentialFamily::compact_bump};

// central difference of the (m-1)-th analytic derivative; validates each
// derivative order against the previous one
double fd_derivative(const PotentialSpec& s, int m, double r, double h) {
    return (s.radial_derivative(m - 1, r + h) - s.radial_derivative(m - 1, r - h)) / (2.0 * h);
}

// deterministic LCG for the Monte-Carlo Rollnik cross-check
struct Lcg {
    std::uint64_t s = 0x9e3779b97f4a7c15ull;
    double next() {
        s = s * 6364136223846793005ull + 1442695040888963407ull;
        return (double)(s >> 11) / (double)(1ull << 53);
    }
};

} // namespace

TEST_CASE("family profiles: values and analytic derivatives") {
    for (PotentialFamily f : all_families) {
        PotentialSpec s{f, 1.0, 1.0, true};
        CHECK(s(0.0) == doctest::Approx(1.0)); // all profiles normalized to amplitude at r = 0
        for (int m = 1; m <= 8; ++m) {
            for (double r : {0.3, 0.7, 1.4, 2.6}) {
                if (f == PotentialFamily::compact_bump && r >= 0.9) continue;
                const double exact = s.radial_derivative(m, r);
                const double fd = fd_derivative(s, m, r, 1e-5);
                CHECK(exact == doctest::Approx(fd).epsilon(1e-6).scale(std::max(1.0, std::abs(exact))));
            }
        }
        // bump vanishes identically outside its support
        if (f == PotentialFamily::compact_bump) {
            CHECK(s(1.2) == 0.0);
            CHECK(s.radial_derivative(3, 1.2) == 0.0);
        }
    }
}

TEST_CASE("kato norm of the unit gaussian is 2 pi") {
    PotentialNorms n = potential_norms(unit_gaussian());
    CHECK(n.kato == doctest::Approx(2.0 * M_PI).epsilon(1e-9));
    // l1 = pi^{3/2}, l2 = sqrt(pi^{3/2}/ (2 sqrt 2))
    CHECK(n.l1 == doctest::Approx(std::pow(M_PI, 1.5)).epsilon(1e-9));
    CHECK(n.l2 == doctest::Approx(std::sqrt(std::pow(M_PI, 1.5) / (2.0 * std::sqrt(2.0)))).epsilon(1e-9));
    // H^0 equals L^2 (Plancherel across two independent quadrature routes)
    CHECK(n.sobolev_h_gamma.at(0) == doctest::Approx(n.l2).epsilon(1e-7));
}

TEST_CASE("amplitude scaling multiplies every norm") {
    const double lam = 2.5;
    PotentialSpec a = unit_gaussian();
    PotentialSpec b = a;
    b.amplitude *= lam;
    PotentialNorms na = potential_norms(a), nb = potential_norms(b);
    CHECK(nb.l1 == doctest::Approx(lam * na.l1).epsilon(1e-12));
    CHECK(nb.l2 == doctest::Approx(lam * na.l2).epsilon(1e-12));
    CHECK(nb.kato == doctest::Approx(lam * na.kato).epsilon(1e-12));
    CHECK(nb.rollnik == doctest::Approx(lam * na.rollnik).epsilon(1e-10));
    for (int g = 0; g <= 4; ++g) {
        CHECK(nb.sobolev_w_gamma_1.at(g) == doctest::Approx(lam * na.sobolev_w_gamma_1.at(g)).epsilon(1e-12));
        CHECK(nb.sobolev_h_gamma.at(g) == doctest::Approx(lam * na.sobolev_h_gamma.at(g)).epsilon(1e-10));
    }
}

TEST_CASE("rollnik: quadrature value, interpolation bound, Monte-Carlo cross-check") {
    for (PotentialFamily f : all_families) {
        PotentialSpec s{f, 1.0, 1.0, true};
        PotentialNorms n = potential_norms(s);
        // (stimroll): ||V||_R <= c1 ||V||_1^{1/3} ||V||_2^{2/3}
        CHECK(n.rollnik <= rollnik_bound_constant() * std::pow(n.l1, 1.0 / 3.0) * std::pow(n.l2, 2.0 / 3.0));
        // (stimkato)
        CHECK(n.kato <= kato_bound_constant() * std::pow(n.l1, 1.0 / 3.0) * std::pow(n.l2, 2.0 / 3.0));
    }
    CHECK(kato_bound_constant() > rollnik_bound_constant());

    // Monte-Carlo oracle for the gaussian Rollnik double integral,
    // importance-sampled from the gaussian itself (deterministic seed)
    PotentialNorms n = potential_norms(unit_gaussian());
    Lcg rng;
    auto normal = [&rng]() {
        const double u1 = std::max(rng.next(), 1e-300), u2 = rng.next();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    };
    const int samples = 400000;
    double acc = 0.0;
    const double norm_const = std::pow(M_PI, 3.0); // (int e^{-x^2} dx)^2 over both points
    for (int i = 0; i < samples; ++i) {
        double x[3], y[3];
        double d2 = 0.0;
        for (int c = 0; c < 3; ++c) {
            x[c] = normal() / std::sqrt(2.0);
            y[c] = normal() / std::sqrt(2.0);
            d2 += (x[c] - y[c]) * (x[c] - y[c]);
        }
        if (d2 > 1e-12) acc += 1.0 / d2;
    }
    const double mc = std::sqrt(norm_const * acc / samples);
    CHECK(n.rollnik == doctest::Approx(mc).epsilon(0.02));
}

TEST_CASE("kato sup is attained at the origin for every family") {
    for (PotentialFamily f : all_families) {
        PotentialSpec s{f, 1.0, 1.3, true};
        QuadratureParams qp;
        qp.radial_points = 1 << 16;
        const double at0 = kato_integral_at(s, 0.0, qp);
        for (double x : {0.1, 0.35, 0.8, 1.3, 2.0, 3.0})
            CHECK(kato_integral_at(s, x * s.range, qp) <= at0 * (1.0 + 1e-9));
    }
}

TEST_CASE("quadrature convergence under resolution doubling") {
    QuadratureParams base, fine;
    base.radial_points = 1 << 20;
    base.rollnik_points = 1 << 16;
    fine.radial_points = 1 << 21;
    fine.rollnik_points = 1 << 17;
    for (PotentialFamily f : all_families) {
        PotentialSpec s{f, 1.0, 1.0, true};
        PotentialNorms a = potential_norms(s, 4, base);
        PotentialNorms b = potential_norms(s, 4, fine);
        auto rel = [](double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(x)); };
        CHECK(rel(a.l1, b.l1) < 1e-8);
        CHECK(rel(a.l2, b.l2) < 1e-8);
        CHECK(rel(a.kato, b.kato) < 1e-8);
        for (int g = 0; g <= 4; ++g) {
            CHECK(rel(a.sobolev_h_gamma.at(g), b.sobolev_h_gamma.at(g)) < 1e-8);
            CHECK(rel(a.sobolev_w_gamma_1.at(g), b.sobolev_w_gamma_1.at(g)) < 1e-8);
        }
        // the log-kernel double integral converges at a weaker rate
        CHECK(rel(a.rollnik, b.rollnik) < 1e-6);
    }
}

TEST_CASE("smallness thresholds") {
    // arithmetic on the quoted prefactor: unit norms, K = 1
    CHECK(alpha_star_from_norms(1, 4, 1.0, 1.0) == doctest::Approx(std::pow(M_PI, 2.0 / 3.0) / 24.0).epsilon(1e-14));
    // 1/K homogeneity
    CHECK(alpha_star_from_norms(2, 4, 1.0, 1.0) == doctest::Approx(0.5 * alpha_star_from_norms(1, 4, 1.0, 1.0)).epsilon(1e-14));

    SmallnessReport probe = smallness_thresholds(unit_gaussian(), 1, 0.0);
    SmallnessReport rep = smallness_thresholds(unit_gaussian(), 1, 0.5 * probe.alpha_star);
    CHECK(rep.alpha_star == rep.alpha_star_gamma.at(4));
    for (int g = 0; g < 4; ++g) CHECK(rep.alpha_star_gamma.at(g + 1) < rep.alpha_star_gamma.at(g));
    CHECK(rep.admissible);

    SmallnessReport rep2 = smallness_thresholds(unit_gaussian(), 2, 0.01);
    for (int g = 0; g <= 4; ++g)
        CHECK(rep2.alpha_star_gamma.at(g) == doctest::Approx(0.5 * rep.alpha_star_gamma.at(g)).epsilon(1e-12));

    SmallnessReport big = smallness_thresholds(unit_gaussian(), 1, 10.0);
    CHECK_FALSE(big.admissible);
}

TEST_CASE("born constants: geometric series, conventions, monotonicity") {
    // q = 1/2: sum (l+1) q^l = 4
    CHECK(born_c0_from_ratio(0.5) == doctest::Approx(4.0 / (2.0 * M_PI)).epsilon(1e-14));
    CHECK_THROWS_AS((void)born_c0_from_ratio(1.0), DivergenceError);

    PotentialSpec s = unit_gaussian();
    SmallnessReport sm = smallness_thresholds(s, 1, 0.0);
    const double alpha = 0.25 * sm.alpha_star; // safely inside every threshold
    BornConstants bc = born_constants(s, 1, alpha, {0, 1, 2, 3, 4}, 2);

    // gamma = 0 series coincides with the c0 series
    CHECK(bc.c_gamma.at(0) == doctest::Approx(bc.c0).epsilon(1e-12));
    // C_gamma nondecreasing in gamma
    for (int g = 0; g < 4; ++g) CHECK(bc.c_gamma.at(g + 1) >= bc.c_gamma.at(g) * (1.0 - 1e-12));
    // a_0 = 1; hatC includes the lambda = 0 term so it is >= 1
    CHECK(bc.a_gamma.at(0) == 1.0);
    for (int g = 1; g <= 4; ++g) CHECK(bc.c_hat_gamma.at(g) >= 1.0);

    // alpha -> 0: c0 -> c_eta/(2 pi), a_gamma -> 0 for gamma >= 1
    BornConstants tiny = born_constants(s, 1, 1e-9, {0, 1, 2}, 1);
    CHECK(tiny.c0 == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-6));
    CHECK(tiny.a_gamma.at(1) < 1e-6);
    CHECK(tiny.a_gamma.at(2) < 1e-6);

    // divergence above the threshold names the threshold
    const double bad_alpha = 1.05 * sm.alpha_star_gamma.at(4);
    bool caught = false;
    try {
        (void)born_constants(s, 1, bad_alpha, {4}, 1);
    } catch (const DivergenceError& e) {
        caught = true;
        CHECK(std::string(e.what()).find("alpha*_4") != std::string::npos);
    }
    CHECK(caught);
}

TEST_CASE("sign constraint") {
    PotentialSpec attractive{PotentialFamily::gaussian, -1.0, 1.0, true};
    CHECK_THROWS(attractive.validate());
    PotentialSpec allowed{PotentialFamily::gaussian, -1.0, 1.0, false};
    CHECK_NOTHROW(allowed.validate());
}

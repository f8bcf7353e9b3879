#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hlsim/grid.hpp"
#include "hlsim/fft.hpp"

using namespace hlsim;

namespace {
SpatialGrid light_line(int n = 256, double L = 24.0) {
    return SpatialGrid::line(n, L, {AxisRole::light});
}
} // namespace

TEST_CASE("grid invariants") {
    SpatialGrid g = light_line();
    CHECK(g.spacing() == doctest::Approx(48.0 / 256));
    CHECK(g.total_points() == 256);
    CHECK_THROWS(SpatialGrid::line(100, 10.0, {AxisRole::light})); // not a power of two
    CHECK_THROWS(SpatialGrid::line(256, -1.0, {AxisRole::light}));
    // heavy axes must precede light axes
    CHECK_THROWS(SpatialGrid::line(64, 10.0, {AxisRole::light, AxisRole::heavy}));
}

TEST_CASE("gaussian packet: normalization and symmetry") {
    SpatialGrid g = light_line();
    WaveFunction psi = make_gaussian(g, {{0.0}, {0.0}, 1.0});
    CHECK(psi.l2_norm() == doctest::Approx(1.0).epsilon(1e-12));
    // even real-valued profile
    const int n = g.points_per_axis;
    for (int i = 1; i < n; ++i) {
        CHECK(psi.amplitudes[i].imag() == doctest::Approx(0.0));
        CHECK(psi.amplitudes[i].real() == doctest::Approx(psi.amplitudes[n - i].real()).epsilon(1e-12));
    }
}

TEST_CASE("gaussian packet: momentum shows up as spectral peak") {
    SpatialGrid g = light_line(512, 32.0);
    const double p0 = 3.0;
    WaveFunction psi = make_gaussian(g, {{0.0}, {p0}, 1.0});
    FftEngine fft(g.fft_dims());
    std::vector<cdouble> hat = psi.amplitudes;
    fft.forward(hat);
    double best = 0.0;
    double k_at_best = 0.0;
    for (int i = 0; i < g.points_per_axis; ++i)
        if (std::abs(hat[i]) > best) {
            best = std::abs(hat[i]);
            k_at_best = g.wavenumber(i);
        }
    CHECK(k_at_best == doctest::Approx(p0).epsilon(0.05));
}

TEST_CASE("gaussian packet: boundary tail rejection") {
    SpatialGrid g = light_line(256, 8.0);
    CHECK_THROWS_AS(make_gaussian(g, {{7.5}, {0.0}, 2.0}), std::invalid_argument);
}

TEST_CASE("separated packets are orthogonal, so b ~ sqrt(2)") {
    SpatialGrid g = light_line(512, 32.0);
    WaveFunction a = make_gaussian(g, {{-8.0}, {2.0}, 1.0});
    WaveFunction b = make_gaussian(g, {{8.0}, {-2.0}, 1.0});
    CHECK(std::abs(inner_product(a, b)) < 1e-8);
    WaveFunction sum = a;
    for (std::size_t i = 0; i < sum.amplitudes.size(); ++i) sum.amplitudes[i] += b.amplitudes[i];
    CHECK(sum.l2_norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
}

TEST_CASE("norms: normalized gaussian") {
    SpatialGrid g = light_line(512, 24.0);
    const double sigma = 1.3;
    WaveFunction psi = make_gaussian(g, {{0.0}, {0.0}, sigma});
    NormReport rep = norms(psi, {0, 1, 2});
    CHECK(rep.l2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.sobolev.at(0) == doctest::Approx(1.0).epsilon(1e-10));
    // H^1 of a normalized width-sigma Gaussian: sqrt(1 + 1/(2 sigma^2))
    // from int (1+k^2) |psihat|^2 dk with |psihat|^2 a width-1/(2sigma^2) Gaussian
    const double expected_h1 = std::sqrt(1.0 + 1.0 / (2.0 * sigma * sigma));
    CHECK(rep.sobolev.at(1) == doctest::Approx(expected_h1).epsilon(1e-10));
    CHECK_FALSE(rep.under_resolved);
}

TEST_CASE("norms: zero state, weighted entry") {
    SpatialGrid g = light_line();
    WaveFunction zero(g);
    NormReport rep = norms(zero, {1}, {{1, 1}});
    CHECK(rep.l1 == 0.0);
    CHECK(rep.l2 == 0.0);
    CHECK(rep.linf == 0.0);
    CHECK(rep.sobolev.at(1) == 0.0);
    CHECK(rep.weighted.at({1, 1}) == 0.0);
}

TEST_CASE("Parseval: position and frequency L2 agree") {
    SpatialGrid g = light_line(256, 20.0);
    WaveFunction psi = make_gaussian(g, {{1.0}, {2.0}, 1.5});
    NormReport rep = norms(psi, {0});
    CHECK(std::abs(rep.sobolev.at(0) - rep.l2) < 1e-10);
}

TEST_CASE("inner product properties") {
    SpatialGrid g = light_line();
    WaveFunction a = make_gaussian(g, {{-1.0}, {1.0}, 1.0});
    WaveFunction b = make_gaussian(g, {{1.5}, {-0.5}, 2.0});
    const cdouble aa = inner_product(a, a);
    CHECK(aa.real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(aa.imag()) < 1e-14);
    const cdouble ab = inner_product(a, b);
    const cdouble ba = inner_product(b, a);
    CHECK(std::abs(ab - std::conj(ba)) < 1e-14);
    CHECK(std::abs(ab) <= 1.0 + 1e-12);
    // conjugate-linearity in the first argument
    WaveFunction ascaled = a;
    const cdouble z(0.3, -0.7);
    for (auto& v : ascaled.amplitudes) v *= z;
    CHECK(std::abs(inner_product(ascaled, b) - std::conj(z) * ab) < 1e-12);

    SpatialGrid other = light_line(128, 24.0);
    WaveFunction c = make_gaussian(other, {{0.0}, {0.0}, 1.0});
    CHECK_THROWS_AS((void)inner_product(a, c), GridMismatchError);
}

TEST_CASE("tensor product: norms multiply, marginals factorize") {
    SpatialGrid gh = SpatialGrid::line(64, 12.0, {AxisRole::heavy});
    SpatialGrid gl = SpatialGrid::line(64, 12.0, {AxisRole::light});
    WaveFunction phi = make_gaussian(gh, {{0.5}, {0.0}, 1.0});
    WaveFunction chi1 = make_gaussian(gl, {{-2.0}, {1.0}, 1.5});
    WaveFunction chi2 = make_gaussian(gl, {{2.0}, {0.0}, 1.0});

    WaveFunction joint = tensor_product({phi, chi1, chi2});
    CHECK(joint.grid.num_axes() == 3);
    CHECK(joint.l2_norm() == doctest::Approx(1.0).epsilon(1e-12));

    // single part: identity
    WaveFunction same = tensor_product({phi});
    CHECK(same.amplitudes == phi.amplitudes);

    // marginal densities factorize: marginal over axis 0 equals |phi|^2
    std::vector<double> rho = marginal_density(joint, 0);
    for (int i = 0; i < gh.points_per_axis; ++i)
        CHECK(rho[i] == doctest::Approx(std::norm(phi.amplitudes[i])).epsilon(1e-10));

    // cross-covariance of a product state vanishes
    const int n = 64;
    double exy = 0.0, ex = 0.0, ey = 0.0;
    std::vector<double> rho1 = marginal_density(joint, 1);
    std::vector<double> rho2 = marginal_density(joint, 2);
    const double dx = joint.grid.spacing();
    for (int i = 0; i < n; ++i) {
        ex += gh.coord(i) * rho1[i] * dx;
        ey += gh.coord(i) * rho2[i] * dx;
    }
    for (std::size_t p = 0; p < joint.amplitudes.size(); ++p) {
        const int i1 = (int)((p / 64) % 64), i2 = (int)(p % 64);
        exy += gh.coord(i1) * gh.coord(i2) * std::norm(joint.amplitudes[p]) * joint.grid.cell_volume();
    }
    CHECK(std::abs(exy - ex * ey) < 1e-10);
}

TEST_CASE("tensor product: capacity error carries an estimate") {
    SpatialGrid g = SpatialGrid::line(1024, 32.0, {AxisRole::light});
    WaveFunction c = make_gaussian(g, {{0.0}, {0.0}, 1.0});
    CHECK_THROWS_AS((void)tensor_product({c, c, c}), CapacityError);
}

TEST_CASE("radial mode: s-wave gaussian norms") {
    SpatialGrid g = SpatialGrid::radial(1024, 32.0);
    WaveFunction psi = make_gaussian(g, {{0.0}, {0.0}, 1.0});
    CHECK(psi.l2_norm() == doctest::Approx(1.0).epsilon(1e-12));
    NormReport rep = norms(psi);
    // psi(x) = N exp(-r^2/2): L1 = N (2 pi)^{3/2}, N^2 pi^{3/2} = 1
    const double N = std::pow(M_PI, -0.75);
    CHECK(rep.l1 == doctest::Approx(N * std::pow(2.0 * M_PI, 1.5)).epsilon(1e-8));
    CHECK(rep.linf == doctest::Approx(N).epsilon(1e-3)); // grid max sits near r = 0
}

TEST_CASE("fourier multiplier of order zero is the identity") {
    SpatialGrid g = light_line(128, 16.0);
    WaveFunction psi = make_gaussian(g, {{0.7}, {1.3}, 1.1});
    FftEngine fft(g.fft_dims());
    std::vector<cdouble> w = psi.amplitudes;
    fft.forward(w);
    fft.backward(w);
    double maxdiff = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) maxdiff = std::max(maxdiff, std::abs(w[i] - psi.amplitudes[i]));
    CHECK(maxdiff < 1e-14);
}

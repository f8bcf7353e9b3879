#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hlsim {

/// Thrown when a Born-type series is requested outside its convergence
/// threshold; the message names the violated threshold.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PotentialFamily { gaussian, exponential, sech_squared, compact_bump };

PotentialFamily potential_family_from_string(const std::string& s);
std::string to_string(PotentialFamily f);

/// Analytic radial potential profile amplitude * g(r / range).
///
///   gaussian      g(u) = exp(-u^2)
///   exponential   g(u) = exp(1 - sqrt(1 + u^2))   (smooth exponential decay)
///   sech_squared  g(u) = sech^2(u)
///   compact_bump  g(u) = exp(1 - 1/(1 - u^2)) for u < 1, else 0
///
/// All profiles are smooth, even, and rapidly decaying, so every Sobolev
/// norm used by the estimates is finite.
struct PotentialSpec {
    PotentialFamily family = PotentialFamily::gaussian;
    double amplitude = 1.0;
    double range = 1.0;
    bool repulsive_required = true;

    void validate() const;
    /// Potential value at radius r (or signed line coordinate; profiles are even).
    double operator()(double r) const;
    /// Exact m-th radial derivative, m <= 8.
    double radial_derivative(int m, double r) const;
    /// Radius beyond which the profile and its derivatives are negligible.
    double support_radius() const;
};

struct PotentialNorms {
    double l1 = 0.0;
    double l2 = 0.0;
    double rollnik = 0.0;
    double kato = 0.0;
    std::map<int, double> sobolev_w_gamma_1; // gamma -> ||V||_{W^{gamma,1}}
    std::map<int, double> sobolev_h_gamma;   // gamma -> ||V||_{H^gamma}
};

struct SmallnessReport {
    double alpha_star = 0.0;                  // Theorem-1 threshold (= gamma = 4 entry)
    std::map<int, double> alpha_star_gamma;   // gamma -> threshold
    double alpha = 0.0;
    bool admissible = false;
};

struct BornConstants {
    double c_eta_convention = 1.0; // cutoff-function constant, reported in units of c_eta := 1
    double c0 = 0.0;
    std::map<int, double> c_gamma;
    std::map<int, double> c_hat_gamma;
    std::map<int, double> a_gamma;
};

/// c1, c2 from the Rollnik / Kato interpolation bounds; c2 > c1.
double rollnik_bound_constant(); // sqrt(3) (2 pi)^{1/3}
double kato_bound_constant();    // 3 pi^{1/3}

struct QuadratureParams {
    int radial_points = 1 << 20;  // 1D trapezoid nodes
    int rollnik_points = 1 << 16; // nodes of the log-kernel product integration
};

/// Integral norms of the (3D radial) potential.  L^1/L^2/Kato and the
/// W^{gamma,1} family reduce to 1D radial quadratures; the Rollnik double
/// integral uses the closed-form angular average of 1/|x-y|^2; H^gamma is
/// evaluated in momentum space from the radial Fourier transform.
PotentialNorms potential_norms(const PotentialSpec& spec, int max_gamma = 4,
                               const QuadratureParams& qp = {});

/// Kato integral  int |V(y)| / |x-y| dy  at distance x from the origin.
/// Confirms numerically that the sup is attained at x = 0.
double kato_integral_at(const PotentialSpec& spec, double x, const QuadratureParams& qp = {});

double alpha_star_from_norms(int K, int gamma, double w_gamma_1, double h_gamma);

SmallnessReport smallness_thresholds(const PotentialSpec& spec, int K, double alpha,
                                     const QuadratureParams& qp = {});

/// Closed-form constants of the Born-series dispersive bounds, in units of
/// c_eta := 1 and with the generic numerical constant c := 1.
/// Throws DivergenceError when alpha sits at or above a requested threshold.
BornConstants born_constants(const PotentialSpec& spec, int K, double alpha,
                             const std::vector<int>& gammas, int N = 1,
                             const QuadratureParams& qp = {});

/// c0 from the geometric series, as a function of q = alpha ||V||_K / (2 pi).
double born_c0_from_ratio(double q);

} // namespace hlsim

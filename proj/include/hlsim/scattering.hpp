#pragma once

#include <map>
#include <vector>

#include "hlsim/propagators.hpp"

namespace hlsim {

/// Thrown when the wave-operator limit fails to certify within tau_max.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when the scattered wave reaches the domain boundary mid-solve.
struct DomainEscapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WaveOperatorResult {
    WaveFunction state; // ~ Omega_+(R)^{-1} chi
    std::vector<double> heavy_config;
    double tau_used = 0.0;
    double cauchy_residual = 0.0;
    double duhamel_tail = 0.0;
    double isometry_defect = 0.0; // | ||state|| - ||chi|| |
    double tail_exponent = 0.0;   // fitted decay power of the Duhamel integrand
};

struct WaveOperatorParams {
    double tau0 = 0.0;    // 0 = auto: 4 range(V) / median packet speed
    double tau_max = 512.0;
    double dt = 1.0 / 128.0;
    double unitarity_tolerance = 1e-10;
    double boundary_threshold = 1e-6; // wrap-mass abort level
};

/// Omega_+(R)^{-1} chi as the strong limit of e^{i tau h0} e^{-i tau h(R)} chi
/// on a doubling tau schedule.  Acceptance needs both the Cauchy criterion
/// || w(2 tau) - w(tau) || <= tol and a measured Duhamel tail
///   alpha int_tau^inf || V_R e^{-i s h(R)} chi || ds <= tol,
/// the integrand extrapolated by its fitted power law.
WaveOperatorResult wave_operator_inverse(const WaveFunction& chi, const std::vector<double>& R,
                                         const HamiltonianSpec& ham, double tol,
                                         const WaveOperatorParams& params = {});

/// Field of transformed light states over a list of heavy configurations.
/// For K = 1 all solves share one batched propagation through the
/// translation identity  Omega_+(R)^{-1} = T_R Omega_+(0)^{-1} T_R^{-1}.
std::vector<WaveOperatorResult> wave_operator_field_1p(const WaveFunction& chi,
                                                       const std::vector<std::vector<double>>& R_grid,
                                                       const HamiltonianSpec& ham, double tol,
                                                       const WaveOperatorParams& params = {});

/// Per-particle field keyed by heavy configuration.
std::map<std::vector<double>, std::vector<WaveOperatorResult>>
wave_operator_field(const std::vector<WaveFunction>& chi_list,
                    const std::vector<std::vector<double>>& R_grid, const HamiltonianSpec& ham,
                    double tol, const WaveOperatorParams& params = {});

/// Translate by dR (positive moves features toward +x), spectral phase shift.
WaveFunction translate(const WaveFunction& psi, double dR);

} // namespace hlsim

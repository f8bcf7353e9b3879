#pragma once

#include <memory>
#include <optional>

#include "hlsim/grid.hpp"
#include "hlsim/potentials.hpp"

namespace hlsim {

/// Thrown when a propagation step breaks L2 norm conservation.
struct UnitarityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SplittingOrder { strang2 };

struct EvolutionConfig {
    double dt = 0.01;
    SplittingOrder splitting_order = SplittingOrder::strang2;
    long max_steps = 1L << 31;
    double unitarity_tolerance = 1e-10;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("EvolutionConfig: dt must be positive");
    }
};

enum class HamiltonianKind { free_light, light_parametric, heavy, joint };

/// One of: free light h0, parametric light h(R) = h0 + alpha sum_l V(.-R_l),
/// heavy X = sum_l (-Delta_{R_l}/2 + U(R_l)), or the full H(eps) where the
/// light kinetic term and the coupling carry the 1/eps factor.
struct HamiltonianSpec {
    HamiltonianKind kind = HamiltonianKind::free_light;
    double epsilon = 1.0; // joint only, in (0, 1]
    double alpha = 0.0;
    std::optional<PotentialSpec> pair_potential;  // V
    std::optional<PotentialSpec> heavy_potential; // U_l (shared across l); none = 0
    std::vector<double> heavy_positions;          // parametric kinds: fixed R_l (1D)

    void validate() const;
};

/// Low-level split-step engine: diagonal kinetic phase in the spectral
/// representation of a contiguous axis block, diagonal potential in position
/// space.  Owns the FFT plans; reusable across calls on the same grid.
class SplitPropagator {
public:
    SplitPropagator(const SpatialGrid& grid, std::vector<double> kinetic,
                    std::vector<double> potential, int kin_axis_first, int kin_axis_count);
    ~SplitPropagator();
    SplitPropagator(const SplitPropagator&) = delete;
    SplitPropagator& operator=(const SplitPropagator&) = delete;

    /// In-place Strang steps  e^{-iV dt/2} e^{-iT dt} e^{-iV dt/2}; enforces
    /// norm preservation within `unitarity_tol` over the whole call.
    void advance(std::vector<cdouble>& amplitudes, double dt, long n_steps, double unitarity_tol = 1e-10);

    const std::vector<double>& kinetic() const { return kinetic_; }
    const std::vector<double>& potential() const { return potential_; }

private:
    SpatialGrid grid_;
    std::vector<double> kinetic_, potential_;
    int kin_first_, kin_count_;
    bool has_potential_;
    std::unique_ptr<FftEngine> fft_;
    // phase tables cached for the last dt
    double cached_dt_ = 0.0;
    std::vector<cdouble> expT_, expV_, expVhalf_;
    void refresh_tables(double dt);
};

/// Kinetic phase coefficients sum_axis mass_coef(axis) k_axis^2 / 2 on the
/// full grid; mass_coef per axis role.
std::vector<double> build_kinetic(const SpatialGrid& grid, double heavy_coef, double light_coef);

/// Position-space potential of a HamiltonianSpec on the grid.
std::vector<double> build_potential(const SpatialGrid& grid, const HamiltonianSpec& ham);

/// Exact spectral free evolution exp(-i t |k|^2 / 2) over all axes (unit
/// mass); t of either sign.
WaveFunction evolve_free(const WaveFunction& psi, double t);

/// Strang-split evolution under the given Hamiltonian for time t >= 0.
WaveFunction evolve_split(const WaveFunction& psi, const HamiltonianSpec& ham, double t,
                          const EvolutionConfig& cfg);

/// exp(-itX) (x) identity on the light axes of a joint state.
WaveFunction evolve_heavy_on_joint(const WaveFunction& psi, const HamiltonianSpec& heavy_ham,
                                   double t, const EvolutionConfig& cfg);

/// <psi, H psi> for a time-independent HamiltonianSpec (conservation probes).
double energy_expectation(const WaveFunction& psi, const HamiltonianSpec& ham);

/// Richardson self-convergence: || psi_dt(t) - psi_{dt/2}(t) ||.
double self_convergence_error(const WaveFunction& psi, const HamiltonianSpec& ham, double t,
                              const EvolutionConfig& cfg);

} // namespace hlsim

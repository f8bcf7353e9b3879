#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hlsim/fft.hpp"

namespace hlsim {

/// Thrown when two states live on incompatible grids.
struct GridMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a requested array would exceed the memory budget.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class AxisRole { heavy, light };

/// Uniform periodic grid over [-half_width, +half_width) per axis.
///
/// dim == 1: each axis is a line coordinate.
/// dim == 3: radial s-wave mode, single axis; amplitudes store the reduced
/// wave u(x) = x psi(|x|), odd in x, and all norms carry the 3D radial
/// measure.  Only single-particle states use this mode.
struct SpatialGrid {
    int dim = 1;
    int points_per_axis = 0;
    double half_width = 0.0;
    std::vector<AxisRole> axes;

    static SpatialGrid line(int n, double half_width, std::vector<AxisRole> axes);
    static SpatialGrid radial(int n, double half_width);

    void validate() const;

    int num_axes() const { return (int)axes.size(); }
    double spacing() const { return 2.0 * half_width / points_per_axis; }
    std::size_t total_points() const;
    bool radial_mode() const { return dim == 3; }

    double coord(int i) const { return -half_width + i * spacing(); }
    /// Signed wavenumber for FFT bin i (standard DFT ordering).
    double wavenumber(int i) const {
        const int n = points_per_axis;
        const int s = (i < n / 2) ? i : i - n;
        return s * (2.0 * M_PI) / (2.0 * half_width);
    }

    /// Quadrature weight of one grid cell: dx^axes in line mode.  Radial-mode
    /// integrals carry an extra per-point factor handled by the norm routines.
    double cell_volume() const;

    int axis_count(AxisRole role) const;
    /// Heavy axes always lead; index of the first light axis.
    int first_light_axis() const;

    bool operator==(const SpatialGrid& o) const = default;

    std::vector<int> fft_dims() const { return std::vector<int>((std::size_t)num_axes(), points_per_axis); }
};

/// Complex amplitudes over a SpatialGrid.
struct WaveFunction {
    SpatialGrid grid;
    std::vector<cdouble> amplitudes;
    double normalization = 0.0; // cached L2 norm, refreshed by normalize()

    WaveFunction() = default;
    explicit WaveFunction(SpatialGrid g)
        : grid(std::move(g)), amplitudes(grid.total_points(), cdouble(0.0, 0.0)) {}

    double l2_norm() const;
    void normalize();
};

struct NormReport {
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
    std::map<int, double> sobolev;                    // m -> H^m via (1+|k|^2)^{m/2}
    std::map<std::pair<int, int>, double> weighted;   // (m, n) -> sum_{|g|<=m} ||<x>^n D^g psi||_2
    double spectral_tail_fraction = 0.0;              // energy in the outer k shell (diagnostic)
    bool under_resolved = false;                      // spectral tail above 1e-6
};

/// Packet parameters per axis; width is shared across axes of one packet.
struct PacketSpec {
    std::vector<double> center;
    std::vector<double> momentum;
    double width = 1.0;
};

/// L2-normalized Gaussian packet  exp(-(x-c)^2/(2w^2)) exp(i p.x).
/// In radial mode (momentum ignored, center must be 0) builds the s-wave
/// reduced function u(x) = x g(|x|).
/// Rejects packets whose boundary tail mass exceeds 1e-8 of the total.
WaveFunction make_gaussian(const SpatialGrid& grid, const PacketSpec& packet);

/// All norms used by the estimates.  Sobolev orders are computed spectrally,
/// weighted norms as  sum_{|gamma|<=m} || <x>^n D^gamma psi ||_{L2}.
/// Radial mode supports l1/l2/linf only (3D measure).
NormReport norms(const WaveFunction& psi, const std::vector<int>& orders = {},
                 const std::vector<std::pair<int, int>>& weights = {});

/// Scalar product, conjugate-linear in the first argument.
cdouble inner_product(const WaveFunction& a, const WaveFunction& b);

/// Joint state psi(x1,...,xM) = prod_k parts[k](x_k...) over the combined
/// axis list.  All parts must share (dim=1, points_per_axis, half_width).
WaveFunction tensor_product(const std::vector<WaveFunction>& parts);

/// Marginal position density over one axis (integrating |psi|^2 over the
/// remaining axes).  Used by product-separability checks.
std::vector<double> marginal_density(const WaveFunction& psi, int axis);

/// Mass fraction |psi|^2 within `cells` cells of the domain boundary on any
/// axis.  Wrap-around monitor for periodic truncation.
double boundary_mass_fraction(const WaveFunction& psi, int cells = 4);

} // namespace hlsim

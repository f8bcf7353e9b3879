#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace hlsim {

using cdouble = std::complex<double>;

/// In-place multi-dimensional complex DFTs on row-major arrays, backed by
/// FFTW.  Plans are created once per (shape, axis block) and reused; the
/// backward transform includes the 1/N normalization so that
/// backward(forward(a)) == a up to roundoff.
class FftEngine {
public:
    explicit FftEngine(std::vector<int> dims);
    ~FftEngine();

    FftEngine(const FftEngine&) = delete;
    FftEngine& operator=(const FftEngine&) = delete;

    const std::vector<int>& dims() const { return dims_; }
    std::size_t size() const { return total_; }

    // Transform over all axes.
    void forward(std::vector<cdouble>& a) { transform_block(a, 0, (int)dims_.size(), false); }
    void backward(std::vector<cdouble>& a) { transform_block(a, 0, (int)dims_.size(), true); }

    // Transform over a contiguous axis block [first, first+count); the other
    // axes are spectators.  Covers heavy-only and light-only evolutions on
    // joint grids (heavy axes lead, light axes trail).
    void forward_axes(std::vector<cdouble>& a, int first, int count) { transform_block(a, first, count, false); }
    void backward_axes(std::vector<cdouble>& a, int first, int count) { transform_block(a, first, count, true); }

private:
    struct Plans;
    void transform_block(std::vector<cdouble>& a, int first, int count, bool inverse);

    std::vector<int> dims_;
    std::size_t total_;
    std::unique_ptr<Plans> plans_;
};

} // namespace hlsim

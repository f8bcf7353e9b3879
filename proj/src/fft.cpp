#include "hlsim/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <stdexcept>

namespace hlsim {

namespace {
std::size_t product(const std::vector<int>& d, int first, int count) {
    std::size_t p = 1;
    for (int i = first; i < first + count; ++i) p *= (std::size_t)d[i];
    return p;
}
} // namespace

struct FftEngine::Plans {
    fftw_complex* buf = nullptr;
    // key: (first, count, inverse)
    std::map<std::tuple<int, int, bool>, fftw_plan> cache;

    ~Plans() {
        for (auto& [k, p] : cache) fftw_destroy_plan(p);
        if (buf) fftw_free(buf);
    }
};

FftEngine::FftEngine(std::vector<int> dims)
    : dims_(std::move(dims)), total_(product(dims_, 0, (int)dims_.size())), plans_(new Plans) {
    if (dims_.empty()) throw std::invalid_argument("FftEngine: empty dims");
    for (int n : dims_)
        if (n < 1) throw std::invalid_argument("FftEngine: bad dimension");
    plans_->buf = fftw_alloc_complex(total_);
    if (!plans_->buf) throw std::bad_alloc();
}

FftEngine::~FftEngine() = default;

void FftEngine::transform_block(std::vector<cdouble>& a, int first, int count, bool inverse) {
    if (a.size() != total_) throw std::invalid_argument("FftEngine: array size mismatch");
    if (first < 0 || count < 1 || first + count > (int)dims_.size())
        throw std::invalid_argument("FftEngine: bad axis block");
    for (int i = first; i < first + count; ++i)
        if (dims_[i] < 2 || (dims_[i] & (dims_[i] - 1)) != 0)
            throw std::invalid_argument("FftEngine: transformed axes must be powers of two");

    auto key = std::make_tuple(first, count, inverse);
    auto it = plans_->cache.find(key);
    if (it == plans_->cache.end()) {
        // Row-major: the block [first, first+count) is repeated `outer` times
        // with stride `inner`; each repetition has `inner` interleaved copies.
        const int outer = (int)product(dims_, 0, first);
        const int inner = (int)product(dims_, first + count, (int)dims_.size() - first - count);
        const std::size_t block = product(dims_, first, count);
        std::vector<int> n(dims_.begin() + first, dims_.begin() + first + count);

        fftw_iodim64 iod[3], howmany[2];
        std::size_t stride = inner;
        for (int i = count - 1; i >= 0; --i) {
            iod[i].n = n[i];
            iod[i].is = iod[i].os = (ptrdiff_t)stride;
            stride *= (std::size_t)n[i];
        }
        int nh = 0;
        if (outer > 1) {
            howmany[nh].n = outer;
            howmany[nh].is = howmany[nh].os = (ptrdiff_t)(block * inner);
            ++nh;
        }
        if (inner > 1) {
            howmany[nh].n = inner;
            howmany[nh].is = howmany[nh].os = 1;
            ++nh;
        }
        fftw_plan p = fftw_plan_guru64_dft(count, iod, nh, howmany, plans_->buf, plans_->buf,
                                           inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
        if (!p) throw std::runtime_error("FftEngine: plan creation failed");
        it = plans_->cache.emplace(key, p).first;
    }

    std::memcpy(static_cast<void*>(plans_->buf), static_cast<const void*>(a.data()), total_ * sizeof(cdouble));
    fftw_execute(it->second);
    std::memcpy(static_cast<void*>(a.data()), static_cast<const void*>(plans_->buf), total_ * sizeof(cdouble));

    if (inverse) {
        const double scale = 1.0 / (double)product(dims_, first, count);
        for (auto& z : a) z *= scale;
    }
}

} // namespace hlsim

#pragma once

// Lattice correlation by zero-padded FFT:
//     out[i] = sum_j data[j] * K(j - i),    i, j in an n x n grid,
// for a kernel given as a function of the integer offset (drow, dcol).
// This is the all-targets form of the cell sums in the quadrature module; it
// reproduces the direct sums to FFT round-off in O(n^2 log n).

#include <bpd/core/errors.hpp>

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <vector>

namespace bpd::fft {

namespace detail {
struct FftwFree {
    void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using Buffer = std::unique_ptr<fftw_complex[], FftwFree>;

inline Buffer alloc(std::size_t count) {
    auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count));
    if (!p) throw Error("fftw_malloc failed");
    return Buffer(p);
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const noexcept { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// The FFTW planner is not re-entrant.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

class LatticeCorrelator {
public:
    explicit LatticeCorrelator(int n) : n_(n), m_(2 * n) {
        if (n <= 0) throw InvalidArgument("LatticeCorrelator: grid size must be positive");
        const std::size_t total = static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_);
        a_ = detail::alloc(total);
        b_ = detail::alloc(total);
        std::lock_guard lock(detail::planner_mutex());
        fwd_a_.reset(fftw_plan_dft_2d(m_, m_, a_.get(), a_.get(), FFTW_FORWARD, FFTW_ESTIMATE));
        fwd_b_.reset(fftw_plan_dft_2d(m_, m_, b_.get(), b_.get(), FFTW_FORWARD, FFTW_ESTIMATE));
        inv_a_.reset(fftw_plan_dft_2d(m_, m_, a_.get(), a_.get(), FFTW_BACKWARD, FFTW_ESTIMATE));
        if (!fwd_a_ || !fwd_b_ || !inv_a_) throw Error("fftw planning failed");
    }

    int size() const noexcept { return n_; }

    /// data: n*n row-major values; kernel(drow, dcol) -> complex, called for
    /// every offset in [-(n-1), n-1]^2. Returns n*n row-major results.
    template <class Kernel>
    std::vector<std::complex<double>> correlate(const std::vector<std::complex<double>>& data,
                                                Kernel&& kernel) {
        const std::size_t n = static_cast<std::size_t>(n_);
        const std::size_t m = static_cast<std::size_t>(m_);
        if (data.size() != n * n) throw InvalidArgument("LatticeCorrelator: data size mismatch");
        for (std::size_t k = 0; k < m * m; ++k) {
            a_[k][0] = a_[k][1] = 0.0;
        }
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                a_[r * m + c][0] = data[r * n + c].real();
                a_[r * m + c][1] = data[r * n + c].imag();
            }
        // Correlation with K equals convolution with K'(e) = K(-e).
        for (std::size_t r = 0; r < m; ++r) {
            const long er = r < n ? static_cast<long>(r) : static_cast<long>(r) - static_cast<long>(m);
            for (std::size_t c = 0; c < m; ++c) {
                const long ec = c < n ? static_cast<long>(c) : static_cast<long>(c) - static_cast<long>(m);
                std::complex<double> v{0.0, 0.0};
                if (er > -static_cast<long>(n) && ec > -static_cast<long>(n))
                    v = kernel(static_cast<int>(-er), static_cast<int>(-ec));
                b_[r * m + c][0] = v.real();
                b_[r * m + c][1] = v.imag();
            }
        }
        fftw_execute(fwd_a_.get());
        fftw_execute(fwd_b_.get());
        for (std::size_t k = 0; k < m * m; ++k) {
            const double re = a_[k][0] * b_[k][0] - a_[k][1] * b_[k][1];
            const double im = a_[k][0] * b_[k][1] + a_[k][1] * b_[k][0];
            a_[k][0] = re;
            a_[k][1] = im;
        }
        fftw_execute(inv_a_.get());
        const double scale = 1.0 / static_cast<double>(m * m);
        std::vector<std::complex<double>> out(n * n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                out[r * n + c] = {a_[r * m + c][0] * scale, a_[r * m + c][1] * scale};
        return out;
    }

private:
    int n_;
    int m_;
    detail::Buffer a_;
    detail::Buffer b_;
    detail::Plan fwd_a_;
    detail::Plan fwd_b_;
    detail::Plan inv_a_;
};

}  // namespace bpd::fft

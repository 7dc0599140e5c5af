#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace cyclodsp {

using cdouble = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Unnormalized DFT plan: X_k = sum_n x_n e^{-j 2 pi k n / N}.
/// Power-of-two sizes run an iterative radix-2 transform with precomputed
/// twiddles; any other size goes through Bluestein's chirp-z reduction to a
/// power-of-two convolution. Plans are immutable after construction and safe
/// to share across threads.
class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n) {
        if (n == 0) throw std::invalid_argument("FftPlan: size must be >= 1");
        if (is_pow2(n_)) {
            init_pow2();
        } else {
            init_bluestein();
        }
    }

    std::size_t size() const { return n_; }

    /// In-place forward DFT.
    void forward(cdouble* data) const {
        if (is_pow2(n_)) {
            pow2_transform(data);
        } else {
            bluestein_transform(data);
        }
    }

    /// In-place inverse DFT including the 1/N factor.
    void inverse(cdouble* data) const {
        for (std::size_t i = 0; i < n_; ++i) data[i] = std::conj(data[i]);
        forward(data);
        const double s = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) data[i] = std::conj(data[i]) * s;
    }

private:
    void init_pow2() {
        bitrev_.resize(n_);
        std::size_t log2n = 0;
        while ((std::size_t{1} << log2n) < n_) ++log2n;
        for (std::size_t i = 0; i < n_; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < log2n; ++b) {
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
            }
            bitrev_[i] = r;
        }
        twiddle_.resize(n_ / 2);
        for (std::size_t k = 0; k < n_ / 2; ++k) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_);
            twiddle_[k] = {std::cos(ang), std::sin(ang)};
        }
    }

    void pow2_transform(cdouble* a) const {
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t j = bitrev_[i];
            if (i < j) std::swap(a[i], a[j]);
        }
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t half = len >> 1;
            const std::size_t step = n_ / len;
            for (std::size_t base = 0; base < n_; base += len) {
                for (std::size_t k = 0; k < half; ++k) {
                    const cdouble w = twiddle_[k * step];
                    const cdouble t = a[base + k + half] * w;
                    a[base + k + half] = a[base + k] - t;
                    a[base + k] += t;
                }
            }
        }
    }

    void init_bluestein() {
        // chirp_[k] = e^{-j pi k^2 / n}; k^2 taken mod 2n to avoid precision
        // loss from large arguments.
        chirp_.resize(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t k2 = (k * k) % (2 * n_);
            const double ang = -std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n_);
            chirp_[k] = {std::cos(ang), std::sin(ang)};
        }
        std::size_t m = 1;
        while (m < 2 * n_ - 1) m <<= 1;
        sub_ = std::make_unique<FftPlan>(m);
        kernel_fft_.assign(m, cdouble{0.0, 0.0});
        kernel_fft_[0] = std::conj(chirp_[0]);
        for (std::size_t k = 1; k < n_; ++k) {
            kernel_fft_[k] = std::conj(chirp_[k]);
            kernel_fft_[m - k] = std::conj(chirp_[k]);
        }
        sub_->forward(kernel_fft_.data());
    }

    void bluestein_transform(cdouble* data) const {
        const std::size_t m = sub_->size();
        std::vector<cdouble> buf(m, cdouble{0.0, 0.0});
        for (std::size_t k = 0; k < n_; ++k) buf[k] = data[k] * chirp_[k];
        sub_->forward(buf.data());
        for (std::size_t k = 0; k < m; ++k) buf[k] *= kernel_fft_[k];
        sub_->inverse(buf.data());
        for (std::size_t k = 0; k < n_; ++k) data[k] = buf[k] * chirp_[k];
    }

    std::size_t n_;
    std::vector<std::size_t> bitrev_;
    std::vector<cdouble> twiddle_;
    std::unique_ptr<FftPlan> sub_;
    std::vector<cdouble> chirp_;
    std::vector<cdouble> kernel_fft_;
};

/// Per-thread plan cache; STFT evaluation re-plans the same size thousands of
/// times otherwise.
inline const FftPlan& cached_fft_plan(std::size_t n) {
    thread_local std::unordered_map<std::size_t, std::unique_ptr<FftPlan>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, std::make_unique<FftPlan>(n)).first;
    }
    return *it->second;
}

inline std::vector<cdouble> fft(std::vector<cdouble> v) {
    cached_fft_plan(v.size()).forward(v.data());
    return v;
}

inline std::vector<cdouble> ifft(std::vector<cdouble> v) {
    cached_fft_plan(v.size()).inverse(v.data());
    return v;
}

/// Full linear convolution of two real sequences (length na + nb - 1),
/// via a zero-padded power-of-two FFT.
inline std::vector<double> linear_convolve(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("linear_convolve: empty input");
    const std::size_t out_len = a.size() + b.size() - 1;
    std::size_t m = 1;
    while (m < out_len) m <<= 1;
    std::vector<cdouble> fa(m, cdouble{}), fb(m, cdouble{});
    for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
    const FftPlan& plan = cached_fft_plan(m);
    plan.forward(fa.data());
    plan.forward(fb.data());
    for (std::size_t i = 0; i < m; ++i) fa[i] *= fb[i];
    plan.inverse(fa.data());
    std::vector<double> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = fa[i].real();
    return out;
}

} // namespace cyclodsp

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "cyclodsp/fft.hpp"
#include "cyclodsp/signal.hpp"

namespace cyclodsp {

/// STFT analysis parameters. The window length always equals the DFT length.
struct StftParams {
    std::size_t dft_len_K = 256;
    std::size_t hop_R = 85;
    WindowKind window = WindowKind::Hann;

    StftParams() = default;
    StftParams(std::size_t K, std::size_t R, WindowKind w) : dft_len_K(K), hop_R(R), window(w) {
        validate();
    }

    void validate() const {
        if (dft_len_K == 0) throw std::invalid_argument("StftParams: dft_len_K must be >= 1");
        if (hop_R == 0 || hop_R > dft_len_K) {
            throw std::invalid_argument("StftParams: require 1 <= hop_R <= dft_len_K");
        }
    }
};

/// Number of analysis frames, L = ceil(1 + (N - K) / R). Signals shorter than
/// one window still produce a single (zero-padded) frame.
inline std::size_t frame_count(std::size_t n_samples, std::size_t dft_len_K, std::size_t hop_R) {
    if (n_samples <= dft_len_K) return 1;
    const std::size_t overhang = n_samples - dft_len_K;
    return 1 + (overhang + hop_R - 1) / hop_R;
}

/// Complex time-frequency grid, frames stored row-major as L x K.
struct StftGrid {
    std::vector<cdouble> frames;
    std::size_t num_frames_L = 0;
    StftParams params;
    double sample_rate_hz = 0.0;

    const cdouble* frame(std::size_t l) const { return frames.data() + l * params.dft_len_K; }
    cdouble* frame(std::size_t l) { return frames.data() + l * params.dft_len_K; }
    cdouble at(std::size_t l, std::size_t k) const { return frames[l * params.dft_len_K + k]; }
};

/// Frame l, bin k holds sum_{n=0}^{K-1} x(n + l R) w(n) e^{-j 2 pi k n / K}.
/// The tail is zero-padded so that every one of the L frames is complete,
/// keeping frame averages uniform.
inline StftGrid stft(const Signal& x, const StftParams& p) {
    p.validate();
    x.validate();
    const std::size_t K = p.dft_len_K;
    const std::size_t R = p.hop_R;
    const std::size_t N = x.size();
    const std::size_t L = frame_count(N, K, R);
    const std::vector<double> w = make_window(p.window, K);
    const FftPlan& plan = cached_fft_plan(K);

    StftGrid g;
    g.frames.assign(L * K, cdouble{0.0, 0.0});
    g.num_frames_L = L;
    g.params = p;
    g.sample_rate_hz = x.sample_rate_hz;

    for (std::size_t l = 0; l < L; ++l) {
        cdouble* f = g.frame(l);
        const std::size_t start = l * R;
        const std::size_t avail = start < N ? N - start : 0;
        const std::size_t m = avail < K ? avail : K;
        for (std::size_t n = 0; n < m; ++n) {
            f[n] = x.samples[start + n] * w[n];
        }
        // remaining bins already zero (tail padding)
        plan.forward(f);
    }
    return g;
}

} // namespace cyclodsp

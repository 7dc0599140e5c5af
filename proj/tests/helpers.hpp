#pragma once

// Shared test oracles. Everything here is deliberately written from the
// definitions (naive loops, direct DFT sums) and stays independent of the
// library code paths it is used to check.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "cyclodsp/rng.hpp"
#include "cyclodsp/signal.hpp"

namespace testutil {

using cyclodsp::cdouble;

/// O(N^2) DFT straight from the definition.
inline std::vector<cdouble> naive_dft(const std::vector<cdouble>& x) {
    const std::size_t n = x.size();
    std::vector<cdouble> out(n, cdouble{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        cdouble acc{0.0, 0.0};
        for (std::size_t m = 0; m < n; ++m) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) *
                               static_cast<double>(m) / static_cast<double>(n);
            acc += x[m] * cdouble{std::cos(ang), std::sin(ang)};
        }
        out[k] = acc;
    }
    return out;
}

/// Independently coded Welch cross estimator: explicit framing, windowing by
/// the closed-form window expression, naive DFT per frame, then the frame
/// average of y_frame[k] * conj(x_frame[k]). Zero-pads the tail like the
/// production estimator but shares none of its code.
inline std::vector<cdouble> welch_cross_oracle(const std::vector<cdouble>& y, const std::vector<cdouble>& x,
                                               std::size_t K, std::size_t R, bool hann) {
    const std::size_t N = x.size();
    std::size_t L = 1;
    if (N > K) {
        L = 1 + (N - K + R - 1) / R;
    }
    std::vector<double> w(K, 1.0);
    if (hann) {
        for (std::size_t n = 0; n < K; ++n) {
            w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                         static_cast<double>(K)));
        }
    }
    std::vector<cdouble> acc(K, cdouble{0.0, 0.0});
    for (std::size_t l = 0; l < L; ++l) {
        std::vector<cdouble> fy(K, cdouble{0.0, 0.0}), fx(K, cdouble{0.0, 0.0});
        for (std::size_t n = 0; n < K; ++n) {
            const std::size_t idx = l * R + n;
            if (idx < N) {
                fy[n] = y[idx] * w[n];
                fx[n] = x[idx] * w[n];
            }
        }
        const std::vector<cdouble> Fy = naive_dft(fy);
        const std::vector<cdouble> Fx = naive_dft(fx);
        for (std::size_t k = 0; k < K; ++k) acc[k] += Fy[k] * std::conj(Fx[k]);
    }
    for (auto& v : acc) v /= static_cast<double>(L);
    return acc;
}

inline std::vector<cdouble> random_complex(std::size_t n, cyclodsp::Rng& rng, double scale = 1.0) {
    std::vector<cdouble> v(n);
    for (auto& c : v) c = {scale * rng.uniform(-1.0, 1.0), scale * rng.uniform(-1.0, 1.0)};
    return v;
}

inline std::vector<double> random_real(std::size_t n, cyclodsp::Rng& rng, double scale = 1.0) {
    std::vector<double> v(n);
    for (auto& c : v) c = scale * rng.uniform(-1.0, 1.0);
    return v;
}

inline double max_abs_diff(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const std::vector<cdouble>& a) {
    double m = 0.0;
    for (const auto& v : a) m = std::max(m, std::abs(v));
    return m;
}

} // namespace testutil

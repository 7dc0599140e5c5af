#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclodsp/log.hpp"
#include "cyclodsp/parallel.hpp"
#include "cyclodsp/signal.hpp"
#include "cyclodsp/stft.hpp"

namespace cyclodsp {

/// Snaps a cyclic frequency to the nearest integer multiple of the cyclic
/// resolution delta_alpha = 2 pi / (L R). Exact half-step ties round toward
/// zero (a tie is detected with a small tolerance so that targets constructed
/// as delta_alpha * (m + 0.5) land deterministically).
inline double snap_to_grid(double alpha_target, std::size_t L, std::size_t R) {
    if (L < 1 || R < 1) throw std::invalid_argument("snap_to_grid: L, R must be >= 1");
    const double delta = 2.0 * std::numbers::pi / (static_cast<double>(L) * static_cast<double>(R));
    const double q = alpha_target / delta;
    const double f = std::floor(q);
    const double frac = q - f;
    double m;
    if (std::abs(frac - 0.5) < 1e-9) {
        m = std::abs(f) < std::abs(f + 1.0) ? f : f + 1.0; // toward zero
    } else {
        m = frac > 0.5 ? f + 1.0 : f;
    }
    return m * delta;
}

/// Sorted, deduplicated set of cyclic frequencies on the resolution grid
/// delta_alpha = 2 pi / (L R). Zero is always a member; every alpha lies in
/// (-pi, pi].
struct CyclicFreqGrid {
    std::vector<double> alphas;
    double delta_alpha = 0.0;

    /// Grid from explicit target frequencies; each target is snapped to the
    /// resolution grid, 0 is inserted, duplicates collapse.
    static CyclicFreqGrid from_targets(const std::vector<double>& targets, std::size_t L, std::size_t R) {
        CyclicFreqGrid g;
        g.delta_alpha = 2.0 * std::numbers::pi / (static_cast<double>(L) * static_cast<double>(R));
        std::vector<long long> cells{0};
        for (double t : targets) {
            if (!(t > -std::numbers::pi - 1e-12) || !(t <= std::numbers::pi + 1e-12)) {
                throw std::invalid_argument("CyclicFreqGrid: target outside (-pi, pi]");
            }
            long long m = std::llround(snap_to_grid(t, L, R) / g.delta_alpha);
            while (static_cast<double>(m) * g.delta_alpha > std::numbers::pi) --m;
            while (static_cast<double>(m) * g.delta_alpha <= -std::numbers::pi) ++m;
            cells.push_back(m);
        }
        std::sort(cells.begin(), cells.end());
        cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
        g.alphas.reserve(cells.size());
        for (long long m : cells) g.alphas.push_back(static_cast<double>(m) * g.delta_alpha);
        return g;
    }

    /// Symmetric grid of every resolution cell with |alpha| <= alpha_abs_max.
    static CyclicFreqGrid from_band(double alpha_abs_max, std::size_t L, std::size_t R) {
        CyclicFreqGrid g;
        g.delta_alpha = 2.0 * std::numbers::pi / (static_cast<double>(L) * static_cast<double>(R));
        if (!(alpha_abs_max >= 0.0)) throw std::invalid_argument("CyclicFreqGrid: negative band");
        long long m_max = static_cast<long long>(std::floor(alpha_abs_max / g.delta_alpha + 1e-12));
        while (static_cast<double>(m_max) * g.delta_alpha > std::numbers::pi) --m_max;
        for (long long m = -m_max; m <= m_max; ++m) {
            g.alphas.push_back(static_cast<double>(m) * g.delta_alpha);
        }
        return g;
    }

    std::size_t size() const { return alphas.size(); }

    /// Index of alpha == 0 (always present).
    std::size_t zero_index() const {
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            if (alphas[i] == 0.0) return i;
        }
        throw std::logic_error("CyclicFreqGrid: zero cycle missing");
    }
};

enum class SpectrumKind { Auto, Cross };

/// Spectral correlation density estimate: complex matrix indexed by
/// (cyclic frequency alpha_p, spectral bin omega_k), row-major.
struct CyclicSpectrum {
    std::vector<cdouble> values; ///< size() == grid.size() * dft_len
    CyclicFreqGrid grid;
    StftParams stft_params;
    double sample_rate_hz = 0.0;
    SpectrumKind kind = SpectrumKind::Cross;

    std::size_t num_alphas() const { return grid.size(); }
    std::size_t num_bins() const { return stft_params.dft_len_K; }
    const cdouble* row(std::size_t p) const { return values.data() + p * num_bins(); }
    cdouble* row(std::size_t p) { return values.data() + p * num_bins(); }
    cdouble at(std::size_t p, std::size_t k) const { return values[p * num_bins() + k]; }
};

namespace detail {

/// One SCD row: (1/L) sum_l Y(omega_k, l) conj(Xmod(omega_k, l)) where Xmod
/// is the STFT of x modulated up by alpha. Writing the row for alpha = 0
/// with an unmodulated x reproduces the Welch cross estimate identically.
inline void acp_row(const StftGrid& y_grid, const StftGrid& xm_grid, cdouble* out) {
    const std::size_t K = y_grid.params.dft_len_K;
    const std::size_t L = y_grid.num_frames_L;
    for (std::size_t k = 0; k < K; ++k) out[k] = cdouble{0.0, 0.0};
    for (std::size_t l = 0; l < L; ++l) {
        const cdouble* yf = y_grid.frame(l);
        const cdouble* xf = xm_grid.frame(l);
        for (std::size_t k = 0; k < K; ++k) {
            out[k] += yf[k] * std::conj(xf[k]);
        }
    }
    const double inv_l = 1.0 / static_cast<double>(L);
    for (std::size_t k = 0; k < K; ++k) out[k] *= inv_l;
}

} // namespace detail

/// Time-averaged cyclic periodogram estimate of the spectral correlation
/// density S_yx(alpha_p, omega_k). The frequency shift is realized by
/// time-domain modulation of x followed by a fresh STFT -- one full STFT per
/// cyclic frequency -- because the cyclic resolution 2 pi / (L R) is far
/// finer than the spectral bin spacing, so a bin translation cannot represent
/// the shift. The unmodulated STFT of y is computed once and shared by all
/// rows; rows are evaluated in parallel.
inline CyclicSpectrum acp_estimate(const Signal& y, const Signal& x, const StftParams& p,
                                   const CyclicFreqGrid& grid) {
    p.validate();
    if (y.size() != x.size()) throw std::invalid_argument("acp_estimate: length mismatch");
    if (y.sample_rate_hz != x.sample_rate_hz) throw std::invalid_argument("acp_estimate: sample-rate mismatch");
    if (grid.size() == 0) throw std::invalid_argument("acp_estimate: empty cyclic grid");

    const std::size_t L = frame_count(x.size(), p.dft_len_K, p.hop_R);
    const double resolution_ratio =
        static_cast<double>(L) * static_cast<double>(p.hop_R) / static_cast<double>(p.dft_len_K);
    if (resolution_ratio < 4.0) {
        log_warn("acp_estimate: spectral/cyclic resolution ratio L*R/K = " + std::to_string(resolution_ratio) +
                 " is below 4; the estimate variance may be high");
    }

    const bool is_auto = y.samples == x.samples;
    const StftGrid y_grid = stft(y, p);

    CyclicSpectrum s;
    s.grid = grid;
    s.stft_params = p;
    s.sample_rate_hz = x.sample_rate_hz;
    s.kind = is_auto ? SpectrumKind::Auto : SpectrumKind::Cross;
    s.values.assign(grid.size() * p.dft_len_K, cdouble{0.0, 0.0});

    parallel_for(grid.size(), [&](std::size_t i) {
        const double alpha = grid.alphas[i];
        if (alpha == 0.0 && is_auto) {
            detail::acp_row(y_grid, y_grid, s.row(i));
        } else {
            const StftGrid xm = stft(modulate(x, alpha), p);
            detail::acp_row(y_grid, xm, s.row(i));
        }
    });
    return s;
}

/// Welch auto-PSD: the alpha = 0 slice of the auto SCD. The imaginary parts
/// of the slice are asserted to be negligible and dropped.
inline std::vector<double> welch_psd(const Signal& x, const StftParams& p) {
    CyclicFreqGrid g;
    g.alphas = {0.0};
    g.delta_alpha = 2.0 * std::numbers::pi /
                    (static_cast<double>(frame_count(x.size(), p.dft_len_K, p.hop_R)) *
                     static_cast<double>(p.hop_R));
    const CyclicSpectrum s = acp_estimate(x, x, p, g);
    std::vector<double> psd(s.num_bins());
    double max_mag = 0.0;
    for (std::size_t k = 0; k < psd.size(); ++k) max_mag = std::max(max_mag, std::abs(s.at(0, k)));
    for (std::size_t k = 0; k < psd.size(); ++k) {
        const cdouble v = s.at(0, k);
        if (std::abs(v.imag()) > 1e-9 * max_mag) {
            throw std::logic_error("welch_psd: non-real auto spectrum at alpha = 0");
        }
        psd[k] = v.real();
    }
    return psd;
}

/// Squared cyclic coherence between a noisy input and output:
///   gamma^2_p(omega_k) = |S_xz(omega_k, alpha_p)|^2
///                        / (S_x(omega_k) |S_zz(omega_k, alpha_p)|).
/// The denominator is floored at 1e-12 times its largest entry so degenerate
/// bins stay finite. Values are nonnegative but, unlike an ordinary
/// coherence, not bounded by one: the normalization follows the cyclic
/// spectrum of the input at (omega_k, alpha_p) rather than shifted PSDs.
inline std::vector<double> cyclic_coherence(const CyclicSpectrum& sxz, const std::vector<double>& sx0,
                                            const CyclicSpectrum& sz_alpha) {
    const std::size_t P = sxz.num_alphas();
    const std::size_t K = sxz.num_bins();
    if (sz_alpha.num_alphas() != P || sz_alpha.num_bins() != K || sx0.size() != K) {
        throw std::invalid_argument("cyclic_coherence: shape mismatch");
    }
    std::vector<double> denom(P * K);
    double dmax = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
        for (std::size_t k = 0; k < K; ++k) {
            const double d = sx0[k] * std::abs(sz_alpha.at(p, k));
            denom[p * K + k] = d;
            dmax = std::max(dmax, d);
        }
    }
    const double floor_eps = 1e-12 * dmax;
    std::vector<double> gamma2(P * K, 0.0);
    for (std::size_t p = 0; p < P; ++p) {
        for (std::size_t k = 0; k < K; ++k) {
            const double num = std::norm(sxz.at(p, k));
            const double den = std::max(denom[p * K + k], floor_eps);
            gamma2[p * K + k] = den > 0.0 ? num / den : 0.0;
        }
    }
    return gamma2;
}

} // namespace cyclodsp

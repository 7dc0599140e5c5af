#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cyclodsp/cyclic.hpp"
#include "cyclodsp/parallel.hpp"
#include "cyclodsp/pitch.hpp"
#include "cyclodsp/signal.hpp"
#include "cyclodsp/stft.hpp"
#include "cyclodsp/synth.hpp"

namespace cyclodsp {

/// Input/output record of the identification problem:
///   z = s + n   (noisy observation of the excitation)
///   x = s * a + v (noisy observation of the system output)
struct IoRecord {
    Signal z; ///< noisy input
    Signal x; ///< noisy output
    std::optional<LtiSystem> truth;

    void validate() const {
        if (z.size() != x.size()) throw std::invalid_argument("IoRecord: length mismatch");
        if (z.sample_rate_hz != x.sample_rate_hz) throw std::invalid_argument("IoRecord: rate mismatch");
    }
};

enum class TfMethod { Wiener, Cyclic };

inline const char* to_string(TfMethod m) { return m == TfMethod::Wiener ? "wiener" : "cyclic"; }

/// Per-bin transfer function estimate with the combination weights and
/// coherences that produced it (one row per cyclic frequency; the Wiener
/// method has the single zero cycle).
struct TransferEstimate {
    std::vector<cdouble> a_hat;        ///< length K
    TfMethod method = TfMethod::Wiener;
    std::vector<double> cycle_alphas;  ///< row order of beta/coherence
    std::vector<double> beta;          ///< row-major cycles x K; rows sum to 1 per bin
    std::vector<double> coherence;     ///< row-major cycles x K, squared cyclic coherence
    std::size_t fallback_bins = 0;     ///< bins that fell back to the zero cycle

    std::size_t num_bins() const { return a_hat.size(); }
    std::size_t num_cycles() const { return cycle_alphas.size(); }
    double beta_at(std::size_t p, std::size_t k) const { return beta[p * num_bins() + k]; }
    double coherence_at(std::size_t p, std::size_t k) const { return coherence[p * num_bins() + k]; }
};

struct SysidOptions {
    /// Cycles whose input cyclic power at a bin falls below prune_eps times
    /// the bin's alpha = 0 power are dropped there before weighting.
    double prune_eps = 1e-3;
};

namespace detail {

/// Coherence-weighted combination of per-cycle ratio estimates:
///   a_hat_k = sum_p beta_p(k) S_xz(omega_k, alpha_p) / S_zz(omega_k, alpha_p)
/// with beta_p(k) = gamma^2_p(k) / sum_p gamma^2_p(k) over the cycles kept at
/// bin k. The per-alpha modulated STFT of z is shared between numerator and
/// denominator rows, which also makes the single-cycle {0} case bit-identical
/// to the plain Welch ratio.
inline TransferEstimate estimate_core(const IoRecord& rec, const StftParams& p,
                                      const std::vector<double>& alphas, TfMethod label,
                                      const SysidOptions& opt) {
    rec.validate();
    p.validate();
    if (alphas.empty()) throw std::invalid_argument("sysid: empty cycle set");
    if (alphas[0] != 0.0) throw std::invalid_argument("sysid: cycle set must contain 0 first");
    if (rec.z.mean_power() == 0.0) throw std::invalid_argument("sysid: degenerate input (zero energy)");

    const std::size_t K = p.dft_len_K;
    const std::size_t P = alphas.size();
    const StftGrid zg = stft(rec.z, p);
    const StftGrid xg = stft(rec.x, p);
    const std::size_t L = zg.num_frames_L;

    std::vector<cdouble> sxz(P * K), szz(P * K);
    parallel_for(P, [&](std::size_t i) {
        const double alpha = alphas[i];
        const StftGrid* zm = &zg;
        StftGrid zmod;
        if (alpha != 0.0) {
            zmod = stft(modulate(rec.z, alpha), p);
            zm = &zmod;
        }
        cdouble* rx = sxz.data() + i * K;
        cdouble* rz = szz.data() + i * K;
        for (std::size_t k = 0; k < K; ++k) {
            rx[k] = cdouble{0.0, 0.0};
            rz[k] = cdouble{0.0, 0.0};
        }
        for (std::size_t l = 0; l < L; ++l) {
            const cdouble* xf = xg.frame(l);
            const cdouble* zf = zg.frame(l);
            const cdouble* mf = zm->frame(l);
            for (std::size_t k = 0; k < K; ++k) {
                const cdouble c = std::conj(mf[k]);
                rx[k] += xf[k] * c;
                rz[k] += zf[k] * c;
            }
        }
        const double inv_l = 1.0 / static_cast<double>(L);
        for (std::size_t k = 0; k < K; ++k) {
            rx[k] *= inv_l;
            rz[k] *= inv_l;
        }
    });

    // output auto-PSD for the coherence normalization
    std::vector<double> sx0(K, 0.0);
    for (std::size_t l = 0; l < L; ++l) {
        const cdouble* xf = xg.frame(l);
        for (std::size_t k = 0; k < K; ++k) sx0[k] += std::norm(xf[k]);
    }
    for (std::size_t k = 0; k < K; ++k) sx0[k] /= static_cast<double>(L);

    // gamma^2 with the shared floor guard
    std::vector<double> gamma2(P * K, 0.0);
    {
        double dmax = 0.0;
        for (std::size_t i = 0; i < P * K; ++i) {
            dmax = std::max(dmax, sx0[i % K] * std::abs(szz[i]));
        }
        const double floor_eps = 1e-12 * dmax;
        for (std::size_t i = 0; i < P * K; ++i) {
            const double den = std::max(sx0[i % K] * std::abs(szz[i]), floor_eps);
            gamma2[i] = den > 0.0 ? std::norm(sxz[i]) / den : 0.0;
        }
    }

    // ratio guard: 1e-12 of the maximum alpha = 0 bin power
    double z0max = 0.0;
    for (std::size_t k = 0; k < K; ++k) z0max = std::max(z0max, std::abs(szz[k]));
    const double ratio_eps = 1e-12 * z0max;

    TransferEstimate est;
    est.method = label;
    est.cycle_alphas = alphas;
    est.a_hat.assign(K, cdouble{0.0, 0.0});
    est.beta.assign(P * K, 0.0);
    est.coherence = gamma2;

    for (std::size_t k = 0; k < K; ++k) {
        const double z0 = std::abs(szz[k]); // alpha = 0 row
        // per-bin pruning of weakly excited cycles
        std::vector<std::size_t> kept;
        kept.reserve(P);
        for (std::size_t pth = 0; pth < P; ++pth) {
            if (pth == 0 || std::abs(szz[pth * K + k]) >= opt.prune_eps * z0) kept.push_back(pth);
        }
        auto ratio_of = [&](std::size_t pth) {
            const cdouble den = szz[pth * K + k];
            const cdouble num = sxz[pth * K + k];
            if (std::abs(den) < ratio_eps) {
                return ratio_eps > 0.0 ? num / ratio_eps : cdouble{0.0, 0.0};
            }
            return num / den;
        };
        if (kept.size() == 1) {
            est.beta[kept[0] * K + k] = 1.0;
            est.a_hat[k] = ratio_of(kept[0]);
            continue;
        }
        double total = 0.0;
        for (std::size_t pth : kept) total += gamma2[pth * K + k];
        if (!(total > 0.0)) {
            // no usable coherence anywhere: fall back to the zero cycle
            est.beta[k] = 1.0;
            est.a_hat[k] = ratio_of(0);
            ++est.fallback_bins;
            continue;
        }
        cdouble acc{0.0, 0.0};
        for (std::size_t pth : kept) {
            const double b = gamma2[pth * K + k] / total;
            est.beta[pth * K + k] = b;
            acc += b * ratio_of(pth);
        }
        est.a_hat[k] = acc;
    }
    if (est.fallback_bins > 0) {
        log_warn("sysid: " + std::to_string(est.fallback_bins) + " bins fell back to the zero cycle");
    }
    return est;
}

} // namespace detail

/// Classic Wiener estimator: per-bin ratio of the Welch cross spectral
/// density to the input auto spectral density.
inline TransferEstimate estimate_wiener(const IoRecord& rec, const StftParams& p) {
    return detail::estimate_core(rec, p, {0.0}, TfMethod::Wiener, {});
}

/// Cyclic estimator: per-cycle SCD ratios combined with squared-cyclic-
/// coherence weights over the candidate cycle set.
inline TransferEstimate estimate_cyclic(const IoRecord& rec, const StftParams& p, const CycleSet& cycles,
                                        const SysidOptions& opt = {}) {
    if (cycles.size() == 0) throw std::invalid_argument("estimate_cyclic: empty cycle set");
    // zero cycle first, remaining ascending (CycleSet keeps 0 in sorted order)
    std::vector<double> alphas{0.0};
    for (double a : cycles.alphas) {
        if (a != 0.0) alphas.push_back(a);
    }
    TransferEstimate est = detail::estimate_core(rec, p, alphas, TfMethod::Cyclic, opt);
    return est;
}

/// Root-mean-square complex error between estimate and truth over the given
/// spectral bins.
inline double rmse(const TransferEstimate& est, const LtiSystem& truth, const std::vector<std::size_t>& eval_bins) {
    if (eval_bins.empty()) throw std::invalid_argument("rmse: empty bin set");
    if (truth.freq_response.size() != est.num_bins()) {
        throw std::invalid_argument("rmse: estimate/truth size mismatch");
    }
    double acc = 0.0;
    for (std::size_t k : eval_bins) {
        if (k >= est.num_bins()) throw std::invalid_argument("rmse: bin index out of range");
        acc += std::norm(est.a_hat[k] - truth.freq_response[k]);
    }
    return std::sqrt(acc / static_cast<double>(eval_bins.size()));
}

/// Positive-frequency bins whose centers lie within half a bin of any
/// harmonic band of the cycle set -- the bins where a harmonic excitation
/// actually carries power.
inline std::vector<std::size_t> harmonic_eval_bins(const CycleSet& cycles, std::size_t dft_len_K) {
    const double dw = 2.0 * std::numbers::pi / static_cast<double>(dft_len_K);
    std::vector<std::size_t> bins;
    for (std::size_t k = 1; k <= dft_len_K / 2; ++k) {
        const double w = dw * static_cast<double>(k);
        for (const auto& b : cycles.bands) {
            if (w >= b.lo - dw / 2.0 && w <= b.hi + dw / 2.0) {
                bins.push_back(k);
                break;
            }
        }
    }
    return bins;
}

/// Every strictly positive-frequency bin below Nyquist; the alternative
/// reading of "frequencies in the candidate set".
inline std::vector<std::size_t> all_eval_bins(std::size_t dft_len_K) {
    std::vector<std::size_t> bins;
    for (std::size_t k = 1; k < (dft_len_K + 1) / 2; ++k) bins.push_back(k);
    return bins;
}

} // namespace cyclodsp

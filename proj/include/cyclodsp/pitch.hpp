#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cyclodsp/cyclic.hpp"
#include "cyclodsp/signal.hpp"

namespace cyclodsp {

/// Fundamental-frequency search band in Hz.
struct PitchBand {
    double f_min_hz = 60.0;
    double f_max_hz = 400.0;
};

/// Tuning of the difference-function pitch tracker. The frame spans
/// frame_mult maximal periods (fs / f_min samples) and the hop is a quarter
/// frame; these are logged into experiment records because no reference
/// values exist for them.
struct YinParams {
    double threshold = 0.15;
    std::size_t frame_mult = 4;
    std::size_t hop_div = 4;
};

/// Per-frame fundamental-frequency track. Unvoiced frames carry NaN.
/// mu0/sigma0 are the mean and (population) standard deviation of the voiced
/// estimates converted to normalized angular frequency, 2 pi f0 / fs.
struct PitchTrack {
    std::vector<double> f0_hz;
    std::vector<double> frame_times_s;
    double sample_rate_hz = 0.0;
    double mu0 = 0.0;    ///< radians/sample, over voiced frames
    double sigma0 = 0.0; ///< radians/sample, over voiced frames

    std::size_t voiced_count() const {
        std::size_t c = 0;
        for (double f : f0_hz) {
            if (!std::isnan(f)) ++c;
        }
        return c;
    }
};

/// Constructs the track a ground-truth bypass would produce: one voiced frame
/// at exactly f0, so mu0 = 2 pi f0 / fs and sigma0 = 0.
inline PitchTrack ground_truth_track(double f0_hz, double sample_rate_hz) {
    if (!(f0_hz > 0.0) || !(f0_hz < sample_rate_hz / 2.0)) {
        throw std::invalid_argument("ground_truth_track: f0 must be in (0, Nyquist)");
    }
    PitchTrack t;
    t.f0_hz = {f0_hz};
    t.frame_times_s = {0.0};
    t.sample_rate_hz = sample_rate_hz;
    t.mu0 = 2.0 * std::numbers::pi * f0_hz / sample_rate_hz;
    t.sigma0 = 0.0;
    return t;
}

/// Frame-wise f0 estimation with the cumulative-mean-normalized difference
/// function and parabolic refinement of the selected lag. Frames whose
/// normalized minimum stays above the periodicity threshold are marked
/// unvoiced.
inline PitchTrack estimate_f0(const Signal& x, const PitchBand& band, const YinParams& yp = {}) {
    const double fs = x.sample_rate_hz;
    if (!(band.f_min_hz > 0.0) || !(band.f_min_hz < band.f_max_hz)) {
        throw std::invalid_argument("estimate_f0: empty or inverted search band");
    }
    if (!(band.f_max_hz < fs / 2.0)) {
        throw std::invalid_argument("estimate_f0: band extends to or above Nyquist");
    }
    if (yp.frame_mult < 2 || yp.hop_div < 1 || !(yp.threshold > 0.0)) {
        throw std::invalid_argument("estimate_f0: bad tracker parameters");
    }

    const std::size_t tau_min = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(fs / band.f_max_hz)));
    const std::size_t tau_max = static_cast<std::size_t>(std::ceil(fs / band.f_min_hz));
    const std::size_t frame_len = yp.frame_mult * tau_max;
    const std::size_t hop = std::max<std::size_t>(1, frame_len / yp.hop_div);
    const std::size_t win = frame_len / 2; // integration window; tau_max <= win by construction
    if (tau_min >= tau_max) throw std::invalid_argument("estimate_f0: degenerate lag range");

    const std::vector<double> xr = x.real_part();

    PitchTrack track;
    track.sample_rate_hz = fs;

    std::vector<double> d(tau_max + 2, 0.0);
    std::vector<double> dn(tau_max + 2, 0.0);
    for (std::size_t start = 0; start + frame_len <= xr.size(); start += hop) {
        const double* f = xr.data() + start;
        // difference function d(tau) over the integration window
        for (std::size_t tau = 1; tau <= tau_max + 1 && tau + win <= frame_len; ++tau) {
            double acc = 0.0;
            for (std::size_t j = 0; j < win; ++j) {
                const double diff = f[j] - f[j + tau];
                acc += diff * diff;
            }
            d[tau] = acc;
        }
        // cumulative-mean normalization
        dn[0] = 1.0;
        double running = 0.0;
        for (std::size_t tau = 1; tau <= tau_max + 1; ++tau) {
            running += d[tau];
            dn[tau] = running > 0.0 ? d[tau] * static_cast<double>(tau) / running : 1.0;
        }
        // first lag under threshold, descended to its local minimum
        std::size_t pick = 0;
        for (std::size_t tau = tau_min; tau <= tau_max; ++tau) {
            if (dn[tau] < yp.threshold) {
                std::size_t t2 = tau;
                while (t2 + 1 <= tau_max && dn[t2 + 1] < dn[t2]) ++t2;
                pick = t2;
                break;
            }
        }
        double f0 = std::numeric_limits<double>::quiet_NaN();
        if (pick != 0) {
            double tau_star = static_cast<double>(pick);
            if (pick > tau_min && pick < tau_max + 1) {
                const double a = dn[pick - 1], b = dn[pick], c = dn[pick + 1];
                const double denom = a - 2.0 * b + c;
                if (denom > 0.0) {
                    double shift = 0.5 * (a - c) / denom;
                    shift = std::clamp(shift, -1.0, 1.0);
                    tau_star += shift;
                }
            }
            f0 = std::clamp(fs / tau_star, band.f_min_hz, band.f_max_hz);
        }
        track.f0_hz.push_back(f0);
        track.frame_times_s.push_back((static_cast<double>(start) + static_cast<double>(frame_len) / 2.0) / fs);
    }

    double sum = 0.0, sum2 = 0.0;
    std::size_t nv = 0;
    for (double f : track.f0_hz) {
        if (std::isnan(f)) continue;
        const double w = 2.0 * std::numbers::pi * f / fs;
        sum += w;
        sum2 += w * w;
        ++nv;
    }
    if (nv > 0) {
        track.mu0 = sum / static_cast<double>(nv);
        const double var = sum2 / static_cast<double>(nv) - track.mu0 * track.mu0;
        track.sigma0 = var > 0.0 ? std::sqrt(var) : 0.0;
    }
    return track;
}

/// Candidate cycle set: for each harmonic index h the band
/// [(mu0 - sigma0) h, (mu0 + sigma0) h], with H chosen so that
/// H (mu0 + sigma0) stays below the frequency cap (default 4 kHz).
struct HarmonicBand {
    std::size_t h = 0;
    double lo = 0.0;
    double hi = 0.0;
};

struct CycleSet {
    std::vector<HarmonicBand> bands;   ///< h = 1..H
    std::vector<double> alphas;        ///< ascending; always contains 0
    std::vector<std::size_t> harmonic; ///< tag per alpha; 0 for the zero cycle
    double delta_alpha = 0.0;

    std::size_t size() const { return alphas.size(); }
};

/// Collects every grid frequency inside each harmonic band (plus the zero
/// cycle). A band too narrow to contain a grid point contributes its snapped
/// center instead, so singleton bands still yield one candidate per harmonic;
/// such fallback members sit within half a grid step of the band.
inline CycleSet build_cycle_set(const PitchTrack& track, const CyclicFreqGrid& grid, double f_cap_hz = 4000.0) {
    if (track.voiced_count() == 0) {
        throw std::invalid_argument("build_cycle_set: track has no voiced frames");
    }
    if (!(grid.delta_alpha > 0.0)) throw std::invalid_argument("build_cycle_set: grid has no resolution");
    const double mu = track.mu0;
    const double sg = track.sigma0;
    const double cap = 2.0 * std::numbers::pi * f_cap_hz / track.sample_rate_hz;
    if (!(mu > 0.0)) throw std::invalid_argument("build_cycle_set: nonpositive mean fundamental");

    CycleSet cs;
    cs.delta_alpha = grid.delta_alpha;
    const std::size_t H = static_cast<std::size_t>(std::floor(cap / (mu + sg)));

    std::vector<long long> taken{0};
    cs.alphas.push_back(0.0);
    cs.harmonic.push_back(0);
    const double d = grid.delta_alpha;
    for (std::size_t h = 1; h <= H; ++h) {
        const double lo = (mu - sg) * static_cast<double>(h);
        const double hi = (mu + sg) * static_cast<double>(h);
        cs.bands.push_back({h, lo, hi});
        long long m_lo = static_cast<long long>(std::ceil(lo / d - 1e-9));
        long long m_hi = static_cast<long long>(std::floor(hi / d + 1e-9));
        m_lo = std::max<long long>(m_lo, 1);
        std::vector<long long> members;
        for (long long m = m_lo; m <= m_hi; ++m) members.push_back(m);
        if (members.empty()) {
            const long long m = std::llround(mu * static_cast<double>(h) / d);
            if (m >= 1) members.push_back(m);
        }
        for (long long m : members) {
            if (std::find(taken.begin(), taken.end(), m) != taken.end()) continue;
            taken.push_back(m);
            cs.alphas.push_back(static_cast<double>(m) * d);
            cs.harmonic.push_back(h);
        }
    }

    // sort ascending, keeping tags aligned
    std::vector<std::size_t> order(cs.alphas.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return cs.alphas[a] < cs.alphas[b]; });
    std::vector<double> sa(order.size());
    std::vector<std::size_t> sh(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        sa[i] = cs.alphas[order[i]];
        sh[i] = cs.harmonic[order[i]];
    }
    cs.alphas = std::move(sa);
    cs.harmonic = std::move(sh);
    return cs;
}

} // namespace cyclodsp

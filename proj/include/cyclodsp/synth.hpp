#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cyclodsp/fft.hpp"
#include "cyclodsp/rng.hpp"
#include "cyclodsp/signal.hpp"

namespace cyclodsp {

/// Amplitude process of the amplitude-modulated harmonic model: white
/// Gaussian samples N(mean, std^2) filtered by a moving average of ma_taps
/// coefficients. The MA filter is normalized to unit DC gain (each tap is
/// 1/ma_taps) so the mean survives filtering unchanged.
struct AmpProcessSpec {
    double mean_mu_b = 0.5;
    double std_sigma_b = std::sqrt(10.0);
    std::size_t ma_taps = 1;

    void validate() const {
        if (!(std_sigma_b >= 0.0)) throw std::invalid_argument("AmpProcessSpec: std must be >= 0");
        if (ma_taps < 1) throw std::invalid_argument("AmpProcessSpec: ma_taps must be >= 1");
    }
};

/// Parameters shared by the two stochastic harmonic models:
///   phase-randomized:     s(n) = sum_h b_h cos(w0 n h + Phi_h), Phi_h ~ U(-pi, pi)
///   amplitude-modulated:  s(n) = sum_h B_h(n) cos(w0 n h + phi_h), phi_h fixed
struct HarmonicModelSpec {
    double omega0 = 0.0;                ///< fundamental, radians/sample, > 0
    std::size_t num_harmonics_H = 0;
    std::vector<double> amplitudes_b;   ///< length H; phase-randomized model only
    std::vector<double> phases_phi;     ///< length H; amplitude-modulated model only
    AmpProcessSpec amp_process;

    void validate_common() const {
        if (!(omega0 > 0.0)) throw std::invalid_argument("HarmonicModelSpec: omega0 must be > 0");
        if (num_harmonics_H == 0) throw std::invalid_argument("HarmonicModelSpec: H must be >= 1");
        if (!(omega0 * static_cast<double>(num_harmonics_H) < std::numbers::pi)) {
            throw std::invalid_argument("HarmonicModelSpec: omega0 * H must be below Nyquist (pi)");
        }
    }
};

/// One realization of the phase-randomized (WSS) harmonic model. All H phases
/// are redrawn independently on every call, in harmonic order h = 1..H.
inline Signal gen_wss_harmonic(const HarmonicModelSpec& spec, std::size_t len_N, double sample_rate_hz,
                               Rng& rng) {
    spec.validate_common();
    if (len_N == 0) throw std::invalid_argument("gen_wss_harmonic: len_N must be >= 1");
    if (spec.amplitudes_b.size() != spec.num_harmonics_H) {
        throw std::invalid_argument("gen_wss_harmonic: amplitudes_b must have H entries");
    }
    for (double b : spec.amplitudes_b) {
        if (!std::isfinite(b)) throw std::invalid_argument("gen_wss_harmonic: non-finite amplitude");
    }
    std::vector<double> phases(spec.num_harmonics_H);
    for (auto& p : phases) p = rng.uniform(-std::numbers::pi, std::numbers::pi);

    std::vector<double> s(len_N, 0.0);
    for (std::size_t h = 1; h <= spec.num_harmonics_H; ++h) {
        const double w = spec.omega0 * static_cast<double>(h);
        const double b = spec.amplitudes_b[h - 1];
        const double ph = phases[h - 1];
        if (b == 0.0) continue;
        for (std::size_t n = 0; n < len_N; ++n) {
            s[n] += b * std::cos(w * static_cast<double>(n) + ph);
        }
    }
    return Signal::from_real(s, sample_rate_hz);
}

/// One realization of the amplitude-modulated (CS) harmonic model. The
/// amplitude streams B_h are mutually independent (drawn sequentially in
/// harmonic order, n ascending within each harmonic); phases are taken from
/// spec.phases_phi and stay fixed across the realization.
inline Signal gen_cs_harmonic(const HarmonicModelSpec& spec, std::size_t len_N, double sample_rate_hz,
                              Rng& rng) {
    spec.validate_common();
    spec.amp_process.validate();
    if (len_N == 0) throw std::invalid_argument("gen_cs_harmonic: len_N must be >= 1");
    if (spec.phases_phi.size() != spec.num_harmonics_H) {
        throw std::invalid_argument("gen_cs_harmonic: phases_phi must have H entries");
    }

    const std::size_t m = spec.amp_process.ma_taps;
    const double mu = spec.amp_process.mean_mu_b;
    const double sd = spec.amp_process.std_sigma_b;

    std::vector<double> s(len_N, 0.0);
    std::vector<double> white(len_N + m - 1);
    for (std::size_t h = 1; h <= spec.num_harmonics_H; ++h) {
        for (auto& w : white) w = rng.gaussian(mu, sd);
        // unit-DC-gain moving average via running sum
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += white[i];
        const double w0h = spec.omega0 * static_cast<double>(h);
        const double ph = spec.phases_phi[h - 1];
        const double inv_m = 1.0 / static_cast<double>(m);
        for (std::size_t n = 0; n < len_N; ++n) {
            const double B = acc * inv_m;
            s[n] += B * std::cos(w0h * static_cast<double>(n) + ph);
            if (n + 1 < len_N) {
                acc += white[n + m] - white[n];
            }
        }
    }
    return Signal::from_real(s, sample_rate_hz);
}

/// LTI system with unit-energy impulse response and its K-point DFT.
struct LtiSystem {
    std::vector<double> impulse_response;
    std::vector<cdouble> freq_response;

    std::size_t size() const { return impulse_response.size(); }
};

/// Random LTI system: K iid draws from U(-1, 1), shaped by the decaying
/// window e^{-10 n / K}, then normalized to unit energy. Draw order is
/// n = 0..K-1, one uniform per tap.
inline LtiSystem gen_lti_system(std::size_t len_K, Rng& rng) {
    if (len_K == 0) throw std::invalid_argument("gen_lti_system: len_K must be >= 1");
    std::vector<double> a(len_K);
    for (std::size_t n = 0; n < len_K; ++n) {
        const double u = rng.uniform(-1.0, 1.0);
        a[n] = u * std::exp(-10.0 * static_cast<double>(n) / static_cast<double>(len_K));
    }
    double energy = 0.0;
    for (double v : a) energy += v * v;
    if (energy == 0.0) {
        // probability ~0 draw; fall back to a unit impulse
        a[0] = 1.0;
        energy = 1.0;
    }
    const double scale = 1.0 / std::sqrt(energy);
    for (double& v : a) v *= scale;

    LtiSystem sys;
    sys.impulse_response = a;
    sys.freq_response.resize(len_K);
    for (std::size_t n = 0; n < len_K; ++n) sys.freq_response[n] = a[n];
    cached_fft_plan(len_K).forward(sys.freq_response.data());
    return sys;
}

/// Sentinel for "no noise".
inline constexpr double kNoNoiseSnrDb = std::numeric_limits<double>::infinity();

/// Adds white Gaussian noise scaled so that 10 log10(P_x / P_v) = snr_db,
/// with powers measured as mean square over the record. Real signals get real
/// noise (one draw per sample); complex signals get circular complex noise
/// (two draws per sample, real then imaginary).
inline Signal add_noise_at_snr(const Signal& x, double snr_db, Rng& rng) {
    if (snr_db == kNoNoiseSnrDb) return x;
    const double px = x.mean_power();
    if (px == 0.0) throw std::invalid_argument("add_noise_at_snr: zero-energy input");
    const double pv = px * std::pow(10.0, -snr_db / 10.0);
    std::vector<cdouble> out(x.size());
    if (x.is_real()) {
        const double sd = std::sqrt(pv);
        for (std::size_t n = 0; n < x.size(); ++n) {
            out[n] = x.samples[n] + cdouble{rng.gaussian(0.0, sd), 0.0};
        }
    } else {
        const double sd = std::sqrt(pv / 2.0);
        for (std::size_t n = 0; n < x.size(); ++n) {
            const double vr = rng.gaussian(0.0, sd);
            const double vi = rng.gaussian(0.0, sd);
            out[n] = x.samples[n] + cdouble{vr, vi};
        }
    }
    return Signal(std::move(out), x.sample_rate_hz);
}

/// Filters a signal through an LTI system (linear convolution, truncated to
/// the input length so records keep their size through the io model).
inline Signal apply_system(const LtiSystem& sys, const Signal& x) {
    const std::vector<double> xr = x.real_part();
    const std::vector<double> full = linear_convolve(sys.impulse_response, xr);
    std::vector<double> out(xr.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = full[i];
    return Signal::from_real(out, x.sample_rate_hz);
}

} // namespace cyclodsp

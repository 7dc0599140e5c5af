#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclodsp/fft.hpp"

namespace cyclodsp {

/// Uniformly sampled time series. Real signals are stored with zero imaginary
/// parts; modulation makes even real inputs complex, so complex storage is
/// first-class. Instances are treated as immutable values after construction.
struct Signal {
    std::vector<cdouble> samples;
    double sample_rate_hz = 0.0;

    Signal() = default;

    Signal(std::vector<cdouble> s, double rate) : samples(std::move(s)), sample_rate_hz(rate) {
        validate();
    }

    static Signal from_real(const std::vector<double>& s, double rate) {
        std::vector<cdouble> c(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) c[i] = {s[i], 0.0};
        return Signal(std::move(c), rate);
    }

    std::size_t size() const { return samples.size(); }

    bool is_real() const {
        for (const auto& v : samples) {
            if (v.imag() != 0.0) return false;
        }
        return true;
    }

    std::vector<double> real_part() const {
        std::vector<double> r(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) r[i] = samples[i].real();
        return r;
    }

    double mean_power() const {
        double acc = 0.0;
        for (const auto& v : samples) acc += std::norm(v);
        return acc / static_cast<double>(samples.size());
    }

    void validate() const {
        if (samples.empty()) throw std::invalid_argument("Signal: length must be >= 1");
        if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("Signal: sample_rate_hz must be > 0");
    }
};

enum class WindowKind { Hann, Rectangular };

inline std::string to_string(WindowKind k) {
    return k == WindowKind::Hann ? "hann" : "rectangular";
}

/// Analysis window of length K. Hann is the periodic variant
/// w(n) = 0.5 (1 - cos(2 pi n / K)), which keeps overlapped Welch-style
/// averaging unbiased; Rectangular is all ones.
inline std::vector<double> make_window(WindowKind kind, std::size_t len_K) {
    if (len_K == 0) throw std::invalid_argument("make_window: zero length");
    std::vector<double> w(len_K, 1.0);
    if (kind == WindowKind::Hann) {
        for (std::size_t n = 0; n < len_K; ++n) {
            w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                         static_cast<double>(len_K)));
        }
    }
    return w;
}

/// out(n) = x(n) e^{j n alpha}. Magnitudes are preserved exactly; the phase
/// rotor advances by recurrence and is resynchronized from libm every 64
/// samples to keep accumulated rounding below ~1e-14 rad.
inline Signal modulate(const Signal& x, double alpha) {
    if (alpha == 0.0) return x;
    const std::size_t n = x.size();
    std::vector<cdouble> out(n);
    const cdouble step = std::polar(1.0, alpha);
    cdouble rotor{1.0, 0.0};
    constexpr std::size_t resync = 64;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % resync == 0) {
            rotor = std::polar(1.0, alpha * static_cast<double>(i));
        }
        out[i] = x.samples[i] * rotor;
        rotor *= step;
    }
    return Signal(std::move(out), x.sample_rate_hz);
}

} // namespace cyclodsp

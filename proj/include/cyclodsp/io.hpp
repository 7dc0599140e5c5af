#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cyclodsp/cyclic.hpp"
#include "cyclodsp/pitch.hpp"
#include "cyclodsp/sysid.hpp"

namespace cyclodsp {

/// Fixed-format float printing so that equal runs produce byte-equal files.
inline std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("io: cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("io: write failed: " + path);
}

inline void write_json(const std::string& path, const nlohmann::ordered_json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

/// Generic CSV: header row plus numeric rows.
inline std::string csv_from_rows(const std::vector<std::string>& header,
                                 const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        out += header[i];
        out += i + 1 == header.size() ? '\n' : ',';
    }
    for (const auto& r : rows) {
        if (r.size() != header.size()) throw std::invalid_argument("csv_from_rows: ragged row");
        for (std::size_t i = 0; i < r.size(); ++i) {
            out += fmt_num(r[i]);
            out += i + 1 == r.size() ? '\n' : ',';
        }
    }
    return out;
}

inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    write_text_file(path, csv_from_rows(header, rows));
}

/// Long-format SCD export: alpha_hz, freq_hz, re, im. One-sided keeps only
/// bins k = 0..K/2 for plotting; two-sided emits every bin with frequencies
/// above Nyquist mapped to their negative aliases.
inline std::string cyclic_spectrum_csv(const CyclicSpectrum& s, bool one_sided = true) {
    const double fs = s.sample_rate_hz;
    const std::size_t K = s.num_bins();
    const std::size_t k_end = one_sided ? K / 2 + 1 : K;
    std::string out = "alpha_hz,freq_hz,re,im\n";
    for (std::size_t p = 0; p < s.num_alphas(); ++p) {
        const double alpha_hz = s.grid.alphas[p] * fs / (2.0 * std::numbers::pi);
        for (std::size_t k = 0; k < k_end; ++k) {
            double freq_hz = static_cast<double>(k) * fs / static_cast<double>(K);
            if (!one_sided && 2 * k > K) freq_hz -= fs;
            const cdouble v = s.at(p, k);
            out += fmt_num(alpha_hz);
            out += ',';
            out += fmt_num(freq_hz);
            out += ',';
            out += fmt_num(v.real());
            out += ',';
            out += fmt_num(v.imag());
            out += '\n';
        }
    }
    return out;
}

inline void write_cyclic_spectrum_csv(const std::string& path, const CyclicSpectrum& s, bool one_sided = true) {
    write_text_file(path, cyclic_spectrum_csv(s, one_sided));
}

/// Binary export for large grids: a small JSON header describing the layout
/// next to a raw little-endian matrix of interleaved (re, im) doubles,
/// row-major over (alpha, bin).
inline void write_cyclic_spectrum_binary(const std::string& json_path, const std::string& bin_path,
                                         const CyclicSpectrum& s, const std::string& config_hash = "") {
    nlohmann::ordered_json hdr;
    hdr["format"] = "cyclodsp-scd-bin-v1";
    if (!config_hash.empty()) hdr["config_hash"] = config_hash;
    hdr["dtype"] = "complex128-le";
    hdr["layout"] = "row-major alpha x bin, interleaved re/im";
    hdr["num_alphas"] = s.num_alphas();
    hdr["num_bins"] = s.num_bins();
    hdr["sample_rate_hz"] = s.sample_rate_hz;
    hdr["delta_alpha_rad"] = s.grid.delta_alpha;
    hdr["alphas_rad"] = s.grid.alphas;
    hdr["data_file"] = bin_path.substr(bin_path.find_last_of('/') + 1);
    write_json(json_path, hdr);

    std::ofstream f(bin_path, std::ios::binary);
    if (!f) throw std::runtime_error("io: cannot open for writing: " + bin_path);
    f.write(reinterpret_cast<const char*>(s.values.data()),
            static_cast<std::streamsize>(s.values.size() * sizeof(cdouble)));
    if (!f) throw std::runtime_error("io: write failed: " + bin_path);
}

/// Pitch track export: time_s, f0_hz, voiced_flag.
inline std::string pitch_track_csv(const PitchTrack& t) {
    std::string out = "time_s,f0_hz,voiced_flag\n";
    for (std::size_t i = 0; i < t.f0_hz.size(); ++i) {
        const bool voiced = !std::isnan(t.f0_hz[i]);
        out += fmt_num(t.frame_times_s[i]);
        out += ',';
        out += voiced ? fmt_num(t.f0_hz[i]) : std::string("nan");
        out += ',';
        out += voiced ? '1' : '0';
        out += '\n';
    }
    return out;
}

inline void write_pitch_track_csv(const std::string& path, const PitchTrack& t) {
    write_text_file(path, pitch_track_csv(t));
}

/// Transfer estimate export: freq_hz, re, im, mag, method.
inline std::string transfer_estimate_csv(const TransferEstimate& est, double sample_rate_hz) {
    const std::size_t K = est.num_bins();
    std::string out = "freq_hz,re,im,mag,method\n";
    for (std::size_t k = 0; k < K; ++k) {
        double freq_hz = static_cast<double>(k) * sample_rate_hz / static_cast<double>(K);
        if (2 * k > K) freq_hz -= sample_rate_hz;
        const cdouble v = est.a_hat[k];
        out += fmt_num(freq_hz);
        out += ',';
        out += fmt_num(v.real());
        out += ',';
        out += fmt_num(v.imag());
        out += ',';
        out += fmt_num(std::abs(v));
        out += ',';
        out += to_string(est.method);
        out += '\n';
    }
    return out;
}

inline void write_transfer_estimate_csv(const std::string& path, const TransferEstimate& est,
                                        double sample_rate_hz) {
    write_text_file(path, transfer_estimate_csv(est, sample_rate_hz));
}

/// Transfer estimate with its combination diagnostics: per-cycle weight and
/// squared-coherence rows alongside the per-bin estimate.
inline nlohmann::ordered_json transfer_estimate_json(const TransferEstimate& est, double sample_rate_hz) {
    nlohmann::ordered_json j;
    j["method"] = to_string(est.method);
    j["sample_rate_hz"] = sample_rate_hz;
    j["num_bins"] = est.num_bins();
    j["cycle_alphas_rad"] = est.cycle_alphas;
    j["fallback_bins"] = est.fallback_bins;
    nlohmann::ordered_json re = nlohmann::ordered_json::array();
    nlohmann::ordered_json im = nlohmann::ordered_json::array();
    for (const auto& v : est.a_hat) {
        re.push_back(v.real());
        im.push_back(v.imag());
    }
    j["a_hat_re"] = std::move(re);
    j["a_hat_im"] = std::move(im);
    nlohmann::ordered_json beta = nlohmann::ordered_json::array();
    nlohmann::ordered_json coh = nlohmann::ordered_json::array();
    for (std::size_t p = 0; p < est.num_cycles(); ++p) {
        nlohmann::ordered_json brow = nlohmann::ordered_json::array();
        nlohmann::ordered_json crow = nlohmann::ordered_json::array();
        for (std::size_t k = 0; k < est.num_bins(); ++k) {
            brow.push_back(est.beta_at(p, k));
            crow.push_back(est.coherence_at(p, k));
        }
        beta.push_back(std::move(brow));
        coh.push_back(std::move(crow));
    }
    j["beta"] = std::move(beta);
    j["coherence_sq"] = std::move(coh);
    return j;
}

} // namespace cyclodsp

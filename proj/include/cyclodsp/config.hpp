#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cyclodsp/io.hpp"
#include "cyclodsp/signal.hpp"

namespace cyclodsp {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { Waveforms, ScdMaps, SysidSweep };

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Waveforms: return "waveforms";
        case ExperimentKind::ScdMaps: return "scd_maps";
        case ExperimentKind::SysidSweep: return "sysid_sweep";
    }
    return "?";
}

enum class SweepAxis { DftLen, InputSnrDb };

inline const char* to_string(SweepAxis a) { return a == SweepAxis::DftLen ? "dft_len" : "input_snr_db"; }

enum class EvalBins { Harmonics, All };

inline const char* to_string(EvalBins e) { return e == EvalBins::Harmonics ? "harmonics" : "all"; }

enum class ScdAvgMode { Complex, Magnitude };

inline const char* to_string(ScdAvgMode m) { return m == ScdAvgMode::Complex ? "complex" : "magnitude"; }

/// Flat experiment configuration covering all three experiment kinds.
/// The STFT hop is never configured directly: it is recomputed as
/// floor(K / 3) wherever the DFT length changes.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::SysidSweep;
    std::uint64_t seed = 12345;

    // shared signal settings
    double sample_rate_hz = 16000.0;
    double duration_s = 1.0;
    std::size_t dft_len = 256;
    WindowKind window = WindowKind::Hann;

    // synthetic excitation
    double f0_min_hz = 90.0;
    double f0_max_hz = 250.0;
    double harmonic_cap_hz = 4000.0;
    double amp_mean = 0.5;
    double amp_var = 10.0;

    // sysid sweep
    SweepAxis sweep_axis = SweepAxis::DftLen;
    std::vector<double> sweep_values = {256.0};
    std::size_t trials = 40;
    double input_snr_db = 0.0;
    double output_snr_db = 40.0;
    std::string excitation = "synthetic"; ///< "synthetic" | "wav"
    std::string wav_dir;
    bool estimate_f0 = false;
    EvalBins eval_bins = EvalBins::Harmonics;
    double f0_est_min_hz = 60.0;
    double f0_est_max_hz = 400.0;
    double prune_eps = 1e-3;

    // scd maps
    std::size_t realizations = 200;
    double f0_hz = 115.0;
    std::size_t num_harmonics = 5;
    double alpha_max_hz = 600.0;
    ScdAvgMode avg_mode = ScdAvgMode::Complex;
    std::string scd_format = "csv"; ///< "csv" | "binary"
    bool two_sided = false;
    std::string wav_path;

    // waveforms
    std::size_t wave_frame_len = 4096;
    std::size_t wave_num_frames = 3;
    double wss_amp = 1.0;
    double lowpass_hz = 600.0;

    std::size_t hop_for(std::size_t k) const { return k / 3 == 0 ? 1 : k / 3; }

    void validate() const {
        if (trials < 1) throw ConfigError("config: trials must be >= 1");
        if (!(sample_rate_hz > 0.0)) throw ConfigError("config: sample_rate_hz must be > 0");
        if (!(duration_s > 0.0)) throw ConfigError("config: duration_s must be > 0");
        if (dft_len < 2) throw ConfigError("config: dft_len must be >= 2");
        if (sweep_values.empty()) throw ConfigError("config: sweep_values must not be empty");
        if (!(f0_min_hz > 0.0) || !(f0_min_hz <= f0_max_hz)) throw ConfigError("config: bad f0 range");
        if (excitation != "synthetic" && excitation != "wav") throw ConfigError("config: bad excitation");
        if (scd_format != "csv" && scd_format != "binary") throw ConfigError("config: bad scd_format");
        if (realizations < 1) throw ConfigError("config: realizations must be >= 1");
        if (num_harmonics < 1) throw ConfigError("config: num_harmonics must be >= 1");
        if (wave_num_frames < 1 || wave_frame_len < 2) throw ConfigError("config: bad waveform framing");
        if (!(amp_var >= 0.0)) throw ConfigError("config: amp_var must be >= 0");
    }
};

namespace detail {

using TomlValue = std::variant<bool, double, std::string, std::vector<double>, std::vector<std::string>>;

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_number(const std::string& tok) {
    const char* c = tok.c_str();
    char* end = nullptr;
    const double v = std::strtod(c, &end);
    if (end == c || *end != '\0') throw ConfigError("config: not a number: '" + tok + "'");
    return v;
}

inline TomlValue parse_value(const std::string& raw) {
    const std::string v = trim(raw);
    if (v.empty()) throw ConfigError("config: empty value");
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"') throw ConfigError("config: unterminated string: " + v);
        return v.substr(1, v.size() - 2);
    }
    if (v.front() == '[') {
        if (v.back() != ']') throw ConfigError("config: unterminated array: " + v);
        std::string body = v.substr(1, v.size() - 2);
        std::vector<std::string> toks;
        std::string cur;
        for (char ch : body) {
            if (ch == ',') {
                toks.push_back(trim(cur));
                cur.clear();
            } else {
                cur += ch;
            }
        }
        if (!trim(cur).empty()) toks.push_back(trim(cur));
        if (!toks.empty() && toks.front().size() > 0 && toks.front().front() == '"') {
            std::vector<std::string> out;
            for (auto& t : toks) {
                if (t.size() < 2 || t.front() != '"' || t.back() != '"') {
                    throw ConfigError("config: bad string array element: " + t);
                }
                out.push_back(t.substr(1, t.size() - 2));
            }
            return out;
        }
        std::vector<double> out;
        for (auto& t : toks) out.push_back(parse_number(t));
        return out;
    }
    if (v == "true") return true;
    if (v == "false") return false;
    return parse_number(v);
}

/// Minimal flat key = value document (TOML subset: comments, strings,
/// numbers, booleans, one-dimensional arrays; no tables or nesting).
inline std::map<std::string, TomlValue> parse_flat_toml(const std::string& text) {
    std::map<std::string, TomlValue> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments outside quotes
        bool quoted = false;
        std::string body;
        for (char ch : line) {
            if (ch == '"') quoted = !quoted;
            if (ch == '#' && !quoted) break;
            body += ch;
        }
        body = trim(body);
        if (body.empty()) continue;
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(body.substr(0, eq));
        if (key.empty()) throw ConfigError("config: line " + std::to_string(lineno) + ": empty key");
        for (char ch : key) {
            if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') {
                throw ConfigError("config: line " + std::to_string(lineno) + ": bad key '" + key + "'");
            }
        }
        if (out.count(key)) throw ConfigError("config: duplicate key '" + key + "'");
        out.emplace(key, parse_value(body.substr(eq + 1)));
    }
    return out;
}

template <typename T>
inline T get_as(const TomlValue& v, const std::string& key);

template <>
inline double get_as<double>(const TomlValue& v, const std::string& key) {
    if (const double* d = std::get_if<double>(&v)) return *d;
    throw ConfigError("config: key '" + key + "' must be a number");
}
template <>
inline bool get_as<bool>(const TomlValue& v, const std::string& key) {
    if (const bool* b = std::get_if<bool>(&v)) return *b;
    throw ConfigError("config: key '" + key + "' must be a boolean");
}
template <>
inline std::string get_as<std::string>(const TomlValue& v, const std::string& key) {
    if (const std::string* s = std::get_if<std::string>(&v)) return *s;
    throw ConfigError("config: key '" + key + "' must be a string");
}
template <>
inline std::vector<double> get_as<std::vector<double>>(const TomlValue& v, const std::string& key) {
    if (const auto* a = std::get_if<std::vector<double>>(&v)) return *a;
    if (const double* d = std::get_if<double>(&v)) return {*d};
    throw ConfigError("config: key '" + key + "' must be a numeric array");
}

inline std::size_t as_size(double v, const std::string& key) {
    if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError("config: key '" + key + "' must be a nonnegative integer");
    return static_cast<std::size_t>(v);
}

} // namespace detail

/// Parses a flat config document into an ExperimentConfig. Unknown keys are
/// rejected so typos fail loudly. `kind` comes from the CLI subcommand; a
/// present `experiment` key must agree with it.
inline ExperimentConfig parse_config(const std::string& text, ExperimentKind kind) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    const auto kv = detail::parse_flat_toml(text);
    using detail::as_size;
    using detail::get_as;
    for (const auto& [key, val] : kv) {
        if (key == "experiment") {
            const std::string want = get_as<std::string>(val, key);
            if (want != to_string(kind)) {
                throw ConfigError("config: experiment '" + want + "' does not match subcommand '" +
                                  to_string(kind) + "'");
            }
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(as_size(get_as<double>(val, key), key));
        } else if (key == "sample_rate_hz") {
            cfg.sample_rate_hz = get_as<double>(val, key);
        } else if (key == "duration_s") {
            cfg.duration_s = get_as<double>(val, key);
        } else if (key == "dft_len") {
            cfg.dft_len = as_size(get_as<double>(val, key), key);
        } else if (key == "window") {
            const std::string w = get_as<std::string>(val, key);
            if (w == "hann") {
                cfg.window = WindowKind::Hann;
            } else if (w == "rectangular") {
                cfg.window = WindowKind::Rectangular;
            } else {
                throw ConfigError("config: window must be 'hann' or 'rectangular'");
            }
        } else if (key == "f0_min_hz") {
            cfg.f0_min_hz = get_as<double>(val, key);
        } else if (key == "f0_max_hz") {
            cfg.f0_max_hz = get_as<double>(val, key);
        } else if (key == "harmonic_cap_hz") {
            cfg.harmonic_cap_hz = get_as<double>(val, key);
        } else if (key == "amp_mean") {
            cfg.amp_mean = get_as<double>(val, key);
        } else if (key == "amp_var") {
            cfg.amp_var = get_as<double>(val, key);
        } else if (key == "sweep_axis") {
            const std::string a = get_as<std::string>(val, key);
            if (a == "dft_len") {
                cfg.sweep_axis = SweepAxis::DftLen;
            } else if (a == "input_snr_db") {
                cfg.sweep_axis = SweepAxis::InputSnrDb;
            } else {
                throw ConfigError("config: sweep_axis must be 'dft_len' or 'input_snr_db'");
            }
        } else if (key == "sweep_values") {
            cfg.sweep_values = get_as<std::vector<double>>(val, key);
        } else if (key == "trials") {
            cfg.trials = as_size(get_as<double>(val, key), key);
        } else if (key == "input_snr_db") {
            cfg.input_snr_db = get_as<double>(val, key);
        } else if (key == "output_snr_db") {
            cfg.output_snr_db = get_as<double>(val, key);
        } else if (key == "excitation") {
            cfg.excitation = get_as<std::string>(val, key);
        } else if (key == "wav_dir") {
            cfg.wav_dir = get_as<std::string>(val, key);
        } else if (key == "estimate_f0") {
            cfg.estimate_f0 = get_as<bool>(val, key);
        } else if (key == "eval_bins") {
            const std::string e = get_as<std::string>(val, key);
            if (e == "harmonics") {
                cfg.eval_bins = EvalBins::Harmonics;
            } else if (e == "all") {
                cfg.eval_bins = EvalBins::All;
            } else {
                throw ConfigError("config: eval_bins must be 'harmonics' or 'all'");
            }
        } else if (key == "f0_est_min_hz") {
            cfg.f0_est_min_hz = get_as<double>(val, key);
        } else if (key == "f0_est_max_hz") {
            cfg.f0_est_max_hz = get_as<double>(val, key);
        } else if (key == "prune_eps") {
            cfg.prune_eps = get_as<double>(val, key);
        } else if (key == "realizations") {
            cfg.realizations = as_size(get_as<double>(val, key), key);
        } else if (key == "f0_hz") {
            cfg.f0_hz = get_as<double>(val, key);
        } else if (key == "num_harmonics") {
            cfg.num_harmonics = as_size(get_as<double>(val, key), key);
        } else if (key == "alpha_max_hz") {
            cfg.alpha_max_hz = get_as<double>(val, key);
        } else if (key == "avg_mode") {
            const std::string m = get_as<std::string>(val, key);
            if (m == "complex") {
                cfg.avg_mode = ScdAvgMode::Complex;
            } else if (m == "magnitude") {
                cfg.avg_mode = ScdAvgMode::Magnitude;
            } else {
                throw ConfigError("config: avg_mode must be 'complex' or 'magnitude'");
            }
        } else if (key == "scd_format") {
            cfg.scd_format = get_as<std::string>(val, key);
        } else if (key == "two_sided") {
            cfg.two_sided = get_as<bool>(val, key);
        } else if (key == "wav_path") {
            cfg.wav_path = get_as<std::string>(val, key);
        } else if (key == "wave_frame_len") {
            cfg.wave_frame_len = as_size(get_as<double>(val, key), key);
        } else if (key == "wave_num_frames") {
            cfg.wave_num_frames = as_size(get_as<double>(val, key), key);
        } else if (key == "wss_amp") {
            cfg.wss_amp = get_as<double>(val, key);
        } else if (key == "lowpass_hz") {
            cfg.lowpass_hz = get_as<double>(val, key);
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path, ExperimentKind kind) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return parse_config(text, kind);
}

/// One key = value line per field in a fixed order; the determinism contract
/// and the config hash are both defined over this serialization.
inline std::string canonical_config_string(const ExperimentConfig& c) {
    std::string s;
    auto add = [&s](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
    auto num = [](double v) { return fmt_num(v); };
    add("experiment", to_string(c.kind));
    add("seed", std::to_string(c.seed));
    add("sample_rate_hz", num(c.sample_rate_hz));
    add("duration_s", num(c.duration_s));
    add("dft_len", std::to_string(c.dft_len));
    add("window", to_string(c.window));
    add("f0_min_hz", num(c.f0_min_hz));
    add("f0_max_hz", num(c.f0_max_hz));
    add("harmonic_cap_hz", num(c.harmonic_cap_hz));
    add("amp_mean", num(c.amp_mean));
    add("amp_var", num(c.amp_var));
    add("sweep_axis", to_string(c.sweep_axis));
    {
        std::string arr = "[";
        for (std::size_t i = 0; i < c.sweep_values.size(); ++i) {
            arr += num(c.sweep_values[i]);
            if (i + 1 < c.sweep_values.size()) arr += ", ";
        }
        arr += "]";
        add("sweep_values", arr);
    }
    add("trials", std::to_string(c.trials));
    add("input_snr_db", num(c.input_snr_db));
    add("output_snr_db", num(c.output_snr_db));
    add("excitation", "\"" + c.excitation + "\"");
    add("wav_dir", "\"" + c.wav_dir + "\"");
    add("estimate_f0", c.estimate_f0 ? "true" : "false");
    add("eval_bins", to_string(c.eval_bins));
    add("f0_est_min_hz", num(c.f0_est_min_hz));
    add("f0_est_max_hz", num(c.f0_est_max_hz));
    add("prune_eps", num(c.prune_eps));
    add("realizations", std::to_string(c.realizations));
    add("f0_hz", num(c.f0_hz));
    add("num_harmonics", std::to_string(c.num_harmonics));
    add("alpha_max_hz", num(c.alpha_max_hz));
    add("avg_mode", to_string(c.avg_mode));
    add("scd_format", "\"" + c.scd_format + "\"");
    add("two_sided", c.two_sided ? "true" : "false");
    add("wav_path", "\"" + c.wav_path + "\"");
    add("wave_frame_len", std::to_string(c.wave_frame_len));
    add("wave_num_frames", std::to_string(c.wave_num_frames));
    add("wss_amp", num(c.wss_amp));
    add("lowpass_hz", num(c.lowpass_hz));
    return s;
}

/// FNV-1a 64-bit over the canonical serialization.
inline std::uint64_t config_hash(const ExperimentConfig& c) {
    const std::string s = canonical_config_string(c);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string config_hash_hex(const ExperimentConfig& c) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(config_hash(c)));
    return buf;
}

} // namespace cyclodsp

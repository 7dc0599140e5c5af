#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cyclodsp/config.hpp"
#include "cyclodsp/cyclic.hpp"
#include "cyclodsp/io.hpp"
#include "cyclodsp/parallel.hpp"
#include "cyclodsp/pitch.hpp"
#include "cyclodsp/rng.hpp"
#include "cyclodsp/signal.hpp"
#include "cyclodsp/stats.hpp"
#include "cyclodsp/sysid.hpp"
#include "cyclodsp/synth.hpp"
#include "cyclodsp/wav.hpp"

namespace cyclodsp {

// Stream purposes for the documented seed-splitting rule. Every random draw
// in an experiment comes from derive_seed(master, {context..., purpose}).
namespace stream {
inline constexpr std::uint64_t kF0Draw = 0;
inline constexpr std::uint64_t kSystem = 1;
inline constexpr std::uint64_t kExcitation = 2;
inline constexpr std::uint64_t kInputNoise = 3;
inline constexpr std::uint64_t kOutputNoise = 4;
inline constexpr std::uint64_t kPhases = 5;
inline constexpr std::uint64_t kWssRealizations = 6;
inline constexpr std::uint64_t kCsRealizations = 7;
} // namespace stream

struct OutputDirMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// sysid sweep
// ---------------------------------------------------------------------------

struct TrialRecord {
    std::size_t trial = 0;
    double f0_hz = 0.0;
    double rmse_wiener = 0.0;
    double rmse_cyclic = 0.0;
};

struct SweepPoint {
    double sweep_value = 0.0;
    std::size_t dft_len = 0;
    double input_snr_db = 0.0;
    std::vector<TrialRecord> trials;
    double mean_wiener = 0.0;
    double mean_cyclic = 0.0;
    ConfidenceInterval ci_wiener;
    ConfidenceInterval ci_cyclic;
    PairedTTest wiener_minus_cyclic; ///< H1: wiener error exceeds cyclic error
};

struct SweepResult {
    ExperimentConfig config;
    std::vector<SweepPoint> points;
};

namespace detail {

inline std::vector<std::string> list_wav_files(const std::string& dir) {
    std::vector<std::string> files;
    if (dir.empty() || !std::filesystem::is_directory(dir)) return files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const std::string p = e.path().string();
        if (p.size() >= 4 && p.substr(p.size() - 4) == ".wav") files.push_back(p);
    }
    std::sort(files.begin(), files.end());
    return files;
}

struct TrialSetup {
    std::size_t dft_len;
    double input_snr_db;
};

inline TrialSetup resolve_point(const ExperimentConfig& cfg, double sweep_value) {
    TrialSetup t{cfg.dft_len, cfg.input_snr_db};
    if (cfg.sweep_axis == SweepAxis::DftLen) {
        if (sweep_value < 2.0 || sweep_value != std::floor(sweep_value)) {
            throw ConfigError("config: dft_len sweep values must be integers >= 2");
        }
        t.dft_len = static_cast<std::size_t>(sweep_value);
    } else {
        t.input_snr_db = sweep_value;
    }
    return t;
}

/// Largest harmonic count with h * w0 strictly below both the cap and Nyquist.
inline std::size_t harmonics_up_to(double omega0, double omega_cap) {
    const double lim = std::min(omega_cap, std::numbers::pi * (1.0 - 1e-9));
    const std::size_t h = static_cast<std::size_t>(std::floor(lim / omega0));
    return h == 0 ? 1 : h;
}

inline TrialRecord run_sysid_trial(const ExperimentConfig& cfg, std::size_t point_idx, std::size_t trial_idx,
                                   const TrialSetup& setup, const std::vector<std::string>& wav_files) {
    const double fs_cfg = cfg.sample_rate_hz;
    const std::size_t K = setup.dft_len;

    Rng rng_f0(derive_seed(cfg.seed, {point_idx, trial_idx, stream::kF0Draw}));
    Rng rng_sys(derive_seed(cfg.seed, {point_idx, trial_idx, stream::kSystem}));
    Rng rng_exc(derive_seed(cfg.seed, {point_idx, trial_idx, stream::kExcitation}));
    Rng rng_nin(derive_seed(cfg.seed, {point_idx, trial_idx, stream::kInputNoise}));
    Rng rng_nout(derive_seed(cfg.seed, {point_idx, trial_idx, stream::kOutputNoise}));

    TrialRecord rec;
    rec.trial = trial_idx;

    // excitation
    Signal s = [&]() -> Signal {
        if (cfg.excitation == "wav") {
            const std::size_t pick = static_cast<std::size_t>(rng_f0.next_u64() % wav_files.size());
            Signal w = read_wav(wav_files[pick]);
            const std::size_t want =
                static_cast<std::size_t>(std::llround(cfg.duration_s * w.sample_rate_hz));
            if (want >= 1 && w.size() > want) {
                const std::size_t off = static_cast<std::size_t>(rng_f0.next_u64() % (w.size() - want + 1));
                std::vector<cdouble> seg(w.samples.begin() + static_cast<std::ptrdiff_t>(off),
                                         w.samples.begin() + static_cast<std::ptrdiff_t>(off + want));
                w = Signal(std::move(seg), w.sample_rate_hz);
            }
            rec.f0_hz = 0.0; // estimated below
            return w;
        }
        const double f0 = rng_f0.uniform(cfg.f0_min_hz, cfg.f0_max_hz);
        rec.f0_hz = f0;
        const double fs = fs_cfg;
        const std::size_t n = static_cast<std::size_t>(std::llround(cfg.duration_s * fs));
        HarmonicModelSpec spec;
        spec.omega0 = 2.0 * std::numbers::pi * f0 / fs;
        const double cap = 2.0 * std::numbers::pi * cfg.harmonic_cap_hz / fs;
        spec.num_harmonics_H = harmonics_up_to(spec.omega0, cap);
        spec.phases_phi.resize(spec.num_harmonics_H);
        for (auto& p : spec.phases_phi) p = rng_exc.uniform(-std::numbers::pi, std::numbers::pi);
        spec.amp_process = {cfg.amp_mean, std::sqrt(cfg.amp_var),
                            std::max<std::size_t>(1, static_cast<std::size_t>(0.1 * fs))};
        return gen_cs_harmonic(spec, n, fs, rng_exc);
    }();

    const double fs = s.sample_rate_hz;
    const StftParams p{K, cfg.hop_for(K), cfg.window};

    const LtiSystem sys = gen_lti_system(K, rng_sys);
    const Signal y = apply_system(sys, s);
    IoRecord io;
    io.z = add_noise_at_snr(s, setup.input_snr_db, rng_nin);
    io.x = add_noise_at_snr(y, cfg.output_snr_db, rng_nout);

    // fundamental track from the clean excitation (or ground-truth bypass)
    PitchTrack track;
    if (cfg.estimate_f0 || cfg.excitation == "wav") {
        track = estimate_f0(s, {cfg.f0_est_min_hz, cfg.f0_est_max_hz});
        if (track.voiced_count() == 0) {
            throw std::runtime_error("sysid trial: pitch tracker found no voiced frames");
        }
        if (cfg.excitation == "wav") {
            rec.f0_hz = track.mu0 * fs / (2.0 * std::numbers::pi);
        }
    } else {
        track = ground_truth_track(rec.f0_hz, fs);
    }

    const std::size_t L = frame_count(s.size(), K, p.hop_R);
    const CyclicFreqGrid grid = CyclicFreqGrid::from_targets({}, L, p.hop_R);
    const CycleSet cycles = build_cycle_set(track, grid, cfg.harmonic_cap_hz);

    SysidOptions opt;
    opt.prune_eps = cfg.prune_eps;
    const TransferEstimate w = estimate_wiener(io, p);
    const TransferEstimate c = estimate_cyclic(io, p, cycles, opt);

    std::vector<std::size_t> bins = cfg.eval_bins == EvalBins::Harmonics
                                        ? harmonic_eval_bins(cycles, K)
                                        : all_eval_bins(K);
    if (bins.empty()) {
        log_warn("sysid trial: no harmonic bins below the cap; falling back to all bins");
        bins = all_eval_bins(K);
    }
    rec.rmse_wiener = rmse(w, sys, bins);
    rec.rmse_cyclic = rmse(c, sys, bins);
    return rec;
}

} // namespace detail

/// Monte Carlo system-identification sweep. Per trial: draw an LTI system,
/// draw the excitation, add input/output noise, recover the cycle set from
/// the clean excitation (or bypass with the known fundamental), run both
/// estimators and evaluate their RMSE against the true transfer function.
/// Trials run in parallel on independently derived streams; aggregation is
/// ordered, so results depend only on (config, seed).
inline SweepResult run_sysid_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.kind != ExperimentKind::SysidSweep) throw ConfigError("run_sysid_sweep: wrong experiment kind");

    std::vector<std::string> wav_files;
    if (cfg.excitation == "wav") {
        wav_files = detail::list_wav_files(cfg.wav_dir);
        if (wav_files.empty()) {
            throw ConfigError("config: excitation = \"wav\" but wav_dir has no .wav files: " + cfg.wav_dir);
        }
    }

    SweepResult result;
    result.config = cfg;
    const std::size_t npts = cfg.sweep_values.size();
    const std::size_t ntr = cfg.trials;
    std::vector<TrialRecord> flat(npts * ntr);
    std::vector<detail::TrialSetup> setups(npts);
    for (std::size_t i = 0; i < npts; ++i) setups[i] = detail::resolve_point(cfg, cfg.sweep_values[i]);

    parallel_for(npts * ntr, [&](std::size_t idx) {
        const std::size_t pt = idx / ntr;
        const std::size_t tr = idx % ntr;
        flat[idx] = detail::run_sysid_trial(cfg, pt, tr, setups[pt], wav_files);
    });

    for (std::size_t i = 0; i < npts; ++i) {
        SweepPoint pt;
        pt.sweep_value = cfg.sweep_values[i];
        pt.dft_len = setups[i].dft_len;
        pt.input_snr_db = setups[i].input_snr_db;
        pt.trials.assign(flat.begin() + static_cast<std::ptrdiff_t>(i * ntr),
                         flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * ntr));
        std::vector<double> rw, rc;
        for (const auto& t : pt.trials) {
            rw.push_back(t.rmse_wiener);
            rc.push_back(t.rmse_cyclic);
        }
        pt.mean_wiener = mean(rw);
        pt.mean_cyclic = mean(rc);
        pt.ci_wiener = ci95(rw);
        pt.ci_cyclic = ci95(rc);
        if (ntr >= 2) pt.wiener_minus_cyclic = paired_t_test(rw, rc);
        result.points.push_back(std::move(pt));
    }
    return result;
}

inline std::string sweep_results_csv(const SweepResult& r) {
    std::string out = "# config_hash=" + config_hash_hex(r.config) + "\n";
    out += "sweep_axis,sweep_value,trial,f0_hz,rmse_wiener,rmse_cyclic\n";
    for (const auto& pt : r.points) {
        for (const auto& t : pt.trials) {
            out += std::string(to_string(r.config.sweep_axis)) + ',' + fmt_num(pt.sweep_value) + ',' +
                   std::to_string(t.trial) + ',' + fmt_num(t.f0_hz) + ',' + fmt_num(t.rmse_wiener) + ',' +
                   fmt_num(t.rmse_cyclic) + '\n';
        }
    }
    return out;
}

inline nlohmann::ordered_json sweep_results_json(const SweepResult& r) {
    nlohmann::ordered_json j;
    j["config_hash"] = config_hash_hex(r.config);
    j["sweep_axis"] = to_string(r.config.sweep_axis);
    j["points"] = nlohmann::ordered_json::array();
    for (const auto& pt : r.points) {
        nlohmann::ordered_json p;
        p["sweep_value"] = pt.sweep_value;
        p["dft_len"] = pt.dft_len;
        p["input_snr_db"] = pt.input_snr_db;
        p["mean_rmse_wiener"] = pt.mean_wiener;
        p["mean_rmse_cyclic"] = pt.mean_cyclic;
        p["ci95_wiener"] = {pt.ci_wiener.lo, pt.ci_wiener.hi};
        p["ci95_cyclic"] = {pt.ci_cyclic.lo, pt.ci_cyclic.hi};
        p["paired_t_wiener_minus_cyclic"] = pt.wiener_minus_cyclic.t_stat;
        p["paired_p_one_sided"] = pt.wiener_minus_cyclic.p_value;
        p["rmse_wiener"] = nlohmann::ordered_json::array();
        p["rmse_cyclic"] = nlohmann::ordered_json::array();
        p["f0_hz"] = nlohmann::ordered_json::array();
        for (const auto& t : pt.trials) {
            p["rmse_wiener"].push_back(t.rmse_wiener);
            p["rmse_cyclic"].push_back(t.rmse_cyclic);
            p["f0_hz"].push_back(t.f0_hz);
        }
        j["points"].push_back(std::move(p));
    }
    return j;
}

// ---------------------------------------------------------------------------
// cyclic-spectrum maps
// ---------------------------------------------------------------------------

struct ScdMapsResult {
    ExperimentConfig config;
    CyclicSpectrum wss_single, wss_avg;
    CyclicSpectrum cs_single, cs_avg;
    std::optional<CyclicSpectrum> real_single;
};

/// Cyclic-spectrum maps of the two harmonic models (single realization and
/// an average over cfg.realizations), plus an optional map of a user WAV.
/// avg_mode selects complex averaging (matches the ensemble expectation) or
/// magnitude averaging. Realizations run sequentially so the reduction order
/// is fixed; rows inside each estimate run in parallel.
inline ScdMapsResult run_scd_maps(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.kind != ExperimentKind::ScdMaps) throw ConfigError("run_scd_maps: wrong experiment kind");

    const double fs = cfg.sample_rate_hz;
    const std::size_t n = static_cast<std::size_t>(std::llround(cfg.duration_s * fs));
    const std::size_t K = cfg.dft_len;
    const StftParams p{K, cfg.hop_for(K), cfg.window};
    const std::size_t L = frame_count(n, K, p.hop_R);
    const CyclicFreqGrid grid =
        CyclicFreqGrid::from_band(2.0 * std::numbers::pi * cfg.alpha_max_hz / fs, L, p.hop_R);

    HarmonicModelSpec base;
    base.omega0 = 2.0 * std::numbers::pi * cfg.f0_hz / fs;
    base.num_harmonics_H = cfg.num_harmonics;
    base.amplitudes_b.assign(cfg.num_harmonics, cfg.wss_amp);
    base.amp_process = {cfg.amp_mean, std::sqrt(cfg.amp_var),
                        std::max<std::size_t>(1, static_cast<std::size_t>(0.1 * fs))};
    base.phases_phi.resize(cfg.num_harmonics);
    {
        Rng rng_ph(derive_seed(cfg.seed, {stream::kPhases}));
        for (auto& ph : base.phases_phi) ph = rng_ph.uniform(-std::numbers::pi, std::numbers::pi);
    }

    ScdMapsResult out;
    out.config = cfg;

    auto averaged = [&](std::uint64_t purpose, auto&& gen) {
        CyclicSpectrum single;
        CyclicSpectrum acc;
        for (std::size_t r = 0; r < cfg.realizations; ++r) {
            Rng rng(derive_seed(cfg.seed, {purpose, r}));
            const Signal s = gen(rng);
            CyclicSpectrum m = acp_estimate(s, s, p, grid);
            if (r == 0) {
                single = m;
                acc = m;
                if (cfg.avg_mode == ScdAvgMode::Magnitude) {
                    for (auto& v : acc.values) v = cdouble{std::abs(v), 0.0};
                }
            } else {
                if (cfg.avg_mode == ScdAvgMode::Complex) {
                    for (std::size_t i = 0; i < acc.values.size(); ++i) acc.values[i] += m.values[i];
                } else {
                    for (std::size_t i = 0; i < acc.values.size(); ++i) {
                        acc.values[i] += cdouble{std::abs(m.values[i]), 0.0};
                    }
                }
            }
        }
        const double inv = 1.0 / static_cast<double>(cfg.realizations);
        for (auto& v : acc.values) v *= inv;
        return std::pair<CyclicSpectrum, CyclicSpectrum>(std::move(single), std::move(acc));
    };

    {
        auto [single, avg] = averaged(stream::kWssRealizations, [&](Rng& rng) {
            return gen_wss_harmonic(base, n, fs, rng);
        });
        out.wss_single = std::move(single);
        out.wss_avg = std::move(avg);
    }
    {
        auto [single, avg] = averaged(stream::kCsRealizations, [&](Rng& rng) {
            return gen_cs_harmonic(base, n, fs, rng);
        });
        out.cs_single = std::move(single);
        out.cs_avg = std::move(avg);
    }

    if (!cfg.wav_path.empty()) {
        Signal w = read_wav(cfg.wav_path);
        const std::size_t want = static_cast<std::size_t>(std::llround(cfg.duration_s * w.sample_rate_hz));
        if (want >= 1 && w.size() > want) {
            std::vector<cdouble> seg(w.samples.begin(), w.samples.begin() + static_cast<std::ptrdiff_t>(want));
            w = Signal(std::move(seg), w.sample_rate_hz);
        }
        const StftParams pw{K, cfg.hop_for(K), cfg.window};
        const std::size_t Lw = frame_count(w.size(), K, pw.hop_R);
        const CyclicFreqGrid gw = CyclicFreqGrid::from_band(
            2.0 * std::numbers::pi * cfg.alpha_max_hz / w.sample_rate_hz, Lw, pw.hop_R);
        out.real_single = acp_estimate(w, w, pw, gw);
    }
    return out;
}

// ---------------------------------------------------------------------------
// waveform comparison
// ---------------------------------------------------------------------------

struct WaveformsResult {
    ExperimentConfig config;
    std::vector<double> wss;  ///< concatenated windowed realizations
    std::vector<double> cs;   ///< one realization of the same total length
    std::vector<double> real; ///< optional low-passed WAV segment
    double real_rate_hz = 0.0;
};

/// The waveform comparison: several independent phase-randomized realizations
/// concatenated frame by frame (the quasi-stationary reading), one continuous
/// amplitude-modulated realization, and optionally a low-passed segment of a
/// real recording.
inline WaveformsResult run_waveforms(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.kind != ExperimentKind::Waveforms) throw ConfigError("run_waveforms: wrong experiment kind");

    const double fs = cfg.sample_rate_hz;
    const std::size_t k = cfg.wave_frame_len;
    const std::size_t total = k * cfg.wave_num_frames;

    HarmonicModelSpec base;
    base.omega0 = 2.0 * std::numbers::pi * cfg.f0_hz / fs;
    base.num_harmonics_H = cfg.num_harmonics;
    base.amplitudes_b.assign(cfg.num_harmonics, cfg.wss_amp);
    base.amp_process = {cfg.amp_mean, std::sqrt(cfg.amp_var),
                        std::max<std::size_t>(1, static_cast<std::size_t>(0.1 * fs))};
    base.phases_phi.resize(cfg.num_harmonics);
    {
        Rng rng_ph(derive_seed(cfg.seed, {stream::kPhases}));
        for (auto& ph : base.phases_phi) ph = rng_ph.uniform(-std::numbers::pi, std::numbers::pi);
    }

    WaveformsResult out;
    out.config = cfg;
    out.wss.reserve(total);
    for (std::size_t r = 0; r < cfg.wave_num_frames; ++r) {
        Rng rng(derive_seed(cfg.seed, {stream::kWssRealizations, r}));
        const Signal s = gen_wss_harmonic(base, k, fs, rng);
        for (const auto& v : s.samples) out.wss.push_back(v.real());
    }
    {
        Rng rng(derive_seed(cfg.seed, {stream::kCsRealizations, 0}));
        const Signal s = gen_cs_harmonic(base, total, fs, rng);
        out.cs = s.real_part();
    }

    if (!cfg.wav_path.empty()) {
        Signal w = read_wav(cfg.wav_path);
        const std::size_t want = std::min<std::size_t>(total, w.size());
        // FFT brickwall low-pass for display only
        std::vector<cdouble> buf(w.samples.begin(), w.samples.begin() + static_cast<std::ptrdiff_t>(want));
        const std::size_t m = buf.size();
        const FftPlan plan(m);
        plan.forward(buf.data());
        const double bin_hz = w.sample_rate_hz / static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double f = static_cast<double>(i) * bin_hz;
            const double f_alias = std::min(f, w.sample_rate_hz - f);
            if (f_alias > cfg.lowpass_hz) buf[i] = cdouble{0.0, 0.0};
        }
        plan.inverse(buf.data());
        out.real.resize(m);
        for (std::size_t i = 0; i < m; ++i) out.real[i] = buf[i].real();
        out.real_rate_hz = w.sample_rate_hz;
    }
    return out;
}

inline std::string waveforms_csv(const WaveformsResult& r) {
    std::string out = "# config_hash=" + config_hash_hex(r.config) + "\n";
    out += "time_s,value,label\n";
    const double fs = r.config.sample_rate_hz;
    for (std::size_t i = 0; i < r.wss.size(); ++i) {
        out += fmt_num(static_cast<double>(i) / fs) + ',' + fmt_num(r.wss[i]) + ",wss\n";
    }
    for (std::size_t i = 0; i < r.cs.size(); ++i) {
        out += fmt_num(static_cast<double>(i) / fs) + ',' + fmt_num(r.cs[i]) + ",cs\n";
    }
    for (std::size_t i = 0; i < r.real.size(); ++i) {
        out += fmt_num(static_cast<double>(i) / r.real_rate_hz) + ',' + fmt_num(r.real[i]) + ",real\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// output directory handling
// ---------------------------------------------------------------------------

/// Creates the output directory. If a previous run left a meta.json with a
/// different config hash, the directory is refused unless force is set.
inline void prepare_outdir(const std::string& dir, const ExperimentConfig& cfg, bool force) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path meta = fs::path(dir) / "meta.json";
    if (fs::exists(meta) && !force) {
        std::ifstream f(meta);
        try {
            nlohmann::json j;
            f >> j;
            const std::string prev = j.value("config_hash", "");
            if (!prev.empty() && prev != config_hash_hex(cfg)) {
                throw OutputDirMismatch("output dir '" + dir + "' holds results for config " + prev +
                                        " (current " + config_hash_hex(cfg) + "); use --force to overwrite");
            }
        } catch (const nlohmann::json::exception&) {
            throw OutputDirMismatch("output dir '" + dir + "' holds an unreadable meta.json; use --force");
        }
    }
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline void write_meta_json(const std::string& dir, const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["tool"] = "cyclodsp";
    j["config_hash"] = config_hash_hex(cfg);
    j["seed"] = cfg.seed;
    j["created_utc"] = utc_timestamp();
    nlohmann::ordered_json c;
    std::istringstream canon(canonical_config_string(cfg));
    std::string line;
    while (std::getline(canon, line)) {
        const std::size_t eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        std::string v = line.substr(eq + 3);
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
        c[line.substr(0, eq)] = v;
    }
    j["config"] = std::move(c);
    write_json((std::filesystem::path(dir) / "meta.json").string(), j);
}

inline void write_sweep_outputs(const SweepResult& r, const std::string& dir, bool force) {
    prepare_outdir(dir, r.config, force);
    namespace fs = std::filesystem;
    write_text_file((fs::path(dir) / "results.csv").string(), sweep_results_csv(r));
    write_text_file((fs::path(dir) / "results.json").string(), sweep_results_json(r).dump(2) + "\n");
    write_meta_json(dir, r.config);
}

inline void write_scd_outputs(const ScdMapsResult& r, const std::string& dir, bool force) {
    prepare_outdir(dir, r.config, force);
    namespace fs = std::filesystem;
    const bool one_sided = !r.config.two_sided;
    const std::string hash_line = "# config_hash=" + config_hash_hex(r.config) + "\n";
    auto emit = [&](const std::string& name, const CyclicSpectrum& s) {
        if (r.config.scd_format == "binary") {
            write_cyclic_spectrum_binary((fs::path(dir) / (name + ".json")).string(),
                                         (fs::path(dir) / (name + ".bin")).string(), s,
                                         config_hash_hex(r.config));
        } else {
            write_text_file((fs::path(dir) / (name + ".csv")).string(),
                            hash_line + cyclic_spectrum_csv(s, one_sided));
        }
    };
    emit("scd_wss_single", r.wss_single);
    emit("scd_wss_avg", r.wss_avg);
    emit("scd_cs_single", r.cs_single);
    emit("scd_cs_avg", r.cs_avg);
    if (r.real_single) emit("scd_real", *r.real_single);
    write_meta_json(dir, r.config);
}

inline void write_waveform_outputs(const WaveformsResult& r, const std::string& dir, bool force) {
    prepare_outdir(dir, r.config, force);
    write_text_file((std::filesystem::path(dir) / "waveforms.csv").string(), waveforms_csv(r));
    write_meta_json(dir, r.config);
}

} // namespace cyclodsp

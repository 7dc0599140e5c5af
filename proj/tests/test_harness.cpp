#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "cyclodsp/config.hpp"
#include "cyclodsp/harness.hpp"
#include "cyclodsp/log.hpp"
#include "cyclodsp/stats.hpp"
#include "cyclodsp/wav.hpp"

using namespace cyclodsp;

namespace {

struct SilenceLogs {
    std::ostream* prev;
    SilenceLogs() : prev(log_sink()) { log_sink() = nullptr; }
    ~SilenceLogs() { log_sink() = prev; }
};

ExperimentConfig tiny_sweep_config() {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::SysidSweep;
    cfg.trials = 3;
    cfg.sweep_values = {64.0};
    cfg.duration_s = 0.25;
    cfg.seed = 20240914;
    return cfg;
}

} // namespace

TEST_CASE("config parsing") {
    SECTION("defaults survive an empty document") {
        const ExperimentConfig cfg = parse_config("", ExperimentKind::SysidSweep);
        REQUIRE(cfg.dft_len == 256);
        REQUIRE(cfg.trials == 40);
        REQUIRE(cfg.input_snr_db == 0.0);
        REQUIRE(cfg.output_snr_db == 40.0);
        REQUIRE(cfg.window == WindowKind::Hann);
        REQUIRE(cfg.f0_min_hz == 90.0);
        REQUIRE(cfg.f0_max_hz == 250.0);
        REQUIRE(cfg.hop_for(cfg.dft_len) == 85); // floor(256 / 3)
    }

    SECTION("full document with comments, arrays, strings, booleans") {
        const std::string doc = R"(
# sweep over DFT length
experiment = "sysid_sweep"
seed = 99
trials = 5
sweep_axis = "dft_len"
sweep_values = [128, 256]   # two points
window = "rectangular"
excitation = "synthetic"
estimate_f0 = true
eval_bins = "all"
input_snr_db = -5.5
duration_s = 0.5
)";
        const ExperimentConfig cfg = parse_config(doc, ExperimentKind::SysidSweep);
        REQUIRE(cfg.seed == 99);
        REQUIRE(cfg.trials == 5);
        REQUIRE(cfg.sweep_values == std::vector<double>{128.0, 256.0});
        REQUIRE(cfg.window == WindowKind::Rectangular);
        REQUIRE(cfg.estimate_f0);
        REQUIRE(cfg.eval_bins == EvalBins::All);
        REQUIRE(cfg.input_snr_db == -5.5);
    }

    SECTION("infinite output SNR spells a noiseless run") {
        const ExperimentConfig cfg = parse_config("output_snr_db = inf\n", ExperimentKind::SysidSweep);
        REQUIRE(std::isinf(cfg.output_snr_db));
    }

    SECTION("rejections") {
        REQUIRE_THROWS_AS(parse_config("nonsense_key = 1\n", ExperimentKind::SysidSweep), ConfigError);
        REQUIRE_THROWS_AS(parse_config("trials = 5\ntrials = 6\n", ExperimentKind::SysidSweep), ConfigError);
        REQUIRE_THROWS_AS(parse_config("experiment = \"waveforms\"\n", ExperimentKind::SysidSweep),
                          ConfigError);
        REQUIRE_THROWS_AS(parse_config("trials\n", ExperimentKind::SysidSweep), ConfigError);
        REQUIRE_THROWS_AS(parse_config("trials = zero\n", ExperimentKind::SysidSweep), ConfigError);
        REQUIRE_THROWS_AS(parse_config("trials = 0\n", ExperimentKind::SysidSweep), ConfigError);
        REQUIRE_THROWS_AS(parse_config("window = \"hamming\"\n", ExperimentKind::SysidSweep), ConfigError);
        REQUIRE_THROWS_AS(parse_config("sweep_values = []\n", ExperimentKind::SysidSweep), ConfigError);
    }

    SECTION("canonical string and hash react to every change") {
        ExperimentConfig a = tiny_sweep_config();
        ExperimentConfig b = a;
        REQUIRE(config_hash(a) == config_hash(b));
        b.seed += 1;
        REQUIRE(config_hash(a) != config_hash(b));
        b = a;
        b.eval_bins = EvalBins::All;
        REQUIRE(config_hash(a) != config_hash(b));
    }
}

TEST_CASE("statistics helpers") {
    SECTION("confidence interval brackets the mean") {
        const std::vector<double> v{0.4, 0.5, 0.45, 0.62, 0.38};
        const auto ci = ci95(v);
        const double m = mean(v);
        REQUIRE(ci.lo <= m);
        REQUIRE(m <= ci.hi);
    }
    SECTION("student t tail probabilities match reference values") {
        REQUIRE(student_t_sf(0.0, 39.0) == Catch::Approx(0.5).margin(1e-12));
        REQUIRE(student_t_sf(1.6849, 39.0) == Catch::Approx(0.05).margin(2e-4));
        REQUIRE(student_t_sf(2.0227, 39.0) == Catch::Approx(0.025).margin(2e-4));
        REQUIRE(student_t_sf(-1.6849, 39.0) == Catch::Approx(0.95).margin(2e-4));
    }
    SECTION("paired test flags an obvious difference") {
        const std::vector<double> a{1.0, 1.1, 0.9, 1.05};
        const std::vector<double> b{0.5, 0.55, 0.45, 0.5};
        const PairedTTest t = paired_t_test(a, b);
        REQUIRE(t.mean_diff > 0.0);
        REQUIRE(t.p_value < 0.01);
    }
}

TEST_CASE("sysid sweep runner") {
    SilenceLogs quiet;

    SECTION("identical seeds give byte-identical serializations") {
        const ExperimentConfig cfg = tiny_sweep_config();
        const SweepResult a = run_sysid_sweep(cfg);
        const SweepResult b = run_sysid_sweep(cfg);
        REQUIRE(sweep_results_csv(a) == sweep_results_csv(b));
        REQUIRE(sweep_results_json(a).dump(2) == sweep_results_json(b).dump(2));
    }

    SECTION("different seeds differ") {
        ExperimentConfig cfg = tiny_sweep_config();
        const SweepResult a = run_sysid_sweep(cfg);
        cfg.seed += 1;
        const SweepResult b = run_sysid_sweep(cfg);
        REQUIRE(sweep_results_csv(a) != sweep_results_csv(b));
    }

    SECTION("confidence bounds bracket the mean and trials are recorded") {
        const SweepResult r = run_sysid_sweep(tiny_sweep_config());
        REQUIRE(r.points.size() == 1);
        const SweepPoint& pt = r.points[0];
        REQUIRE(pt.trials.size() == 3);
        REQUIRE(pt.ci_wiener.lo <= pt.mean_wiener);
        REQUIRE(pt.mean_wiener <= pt.ci_wiener.hi);
        REQUIRE(pt.ci_cyclic.lo <= pt.mean_cyclic);
        REQUIRE(pt.mean_cyclic <= pt.ci_cyclic.hi);
        for (const auto& t : pt.trials) {
            REQUIRE(t.rmse_wiener > 0.0);
            REQUIRE(t.rmse_cyclic > 0.0);
            REQUIRE(t.f0_hz >= 90.0);
            REQUIRE(t.f0_hz <= 250.0);
        }
    }

    SECTION("input snr sweep axis resolves points") {
        ExperimentConfig cfg = tiny_sweep_config();
        cfg.sweep_axis = SweepAxis::InputSnrDb;
        cfg.sweep_values = {-5.0, 10.0};
        cfg.trials = 2;
        const SweepResult r = run_sysid_sweep(cfg);
        REQUIRE(r.points.size() == 2);
        REQUIRE(r.points[0].input_snr_db == -5.0);
        REQUIRE(r.points[1].input_snr_db == 10.0);
        REQUIRE(r.points[0].dft_len == cfg.dft_len);
    }

    SECTION("wav excitation: files are read, trimmed, and tracked") {
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / "cyclodsp_wavdir_test";
        fs::create_directories(dir);
        {
            // two half-second 150 Hz harmonic recordings
            Rng rng(5);
            HarmonicModelSpec spec;
            spec.omega0 = 2.0 * std::numbers::pi * 150.0 / 16000.0;
            spec.num_harmonics_H = 8;
            spec.amplitudes_b.assign(8, 1.0);
            spec.phases_phi.assign(8, 0.4);
            spec.amp_process = {0.5, std::sqrt(10.0), 1600};
            for (int i = 0; i < 2; ++i) {
                Signal s = gen_cs_harmonic(spec, 8000, 16000.0, rng);
                double peak = 0.0;
                for (const auto& v : s.samples) peak = std::max(peak, std::abs(v.real()));
                std::vector<double> scaled(s.size());
                for (std::size_t n = 0; n < s.size(); ++n) scaled[n] = 0.8 * s.samples[n].real() / peak;
                write_wav((dir / ("v" + std::to_string(i) + ".wav")).string(),
                          Signal::from_real(scaled, 16000.0));
            }
        }
        ExperimentConfig cfg = tiny_sweep_config();
        cfg.excitation = "wav";
        cfg.wav_dir = dir.string();
        cfg.trials = 2;
        cfg.duration_s = 0.4;
        const SweepResult r = run_sysid_sweep(cfg);
        REQUIRE(r.points[0].trials.size() == 2);
        for (const auto& t : r.points[0].trials) {
            REQUIRE(std::abs(t.f0_hz - 150.0) < 5.0); // estimated from the recording
        }

        ExperimentConfig empty = cfg;
        empty.wav_dir = (dir / "missing").string();
        REQUIRE_THROWS_AS(run_sysid_sweep(empty), ConfigError);
    }
}

TEST_CASE("waveform experiment") {
    SilenceLogs quiet;
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::Waveforms;
    cfg.sample_rate_hz = 48000.0;
    cfg.f0_hz = 115.0;
    cfg.num_harmonics = 5;
    cfg.wave_frame_len = 4096;
    cfg.wave_num_frames = 3;
    cfg.seed = 31;

    const WaveformsResult r = run_waveforms(cfg);
    REQUIRE(r.wss.size() == 3 * 4096);
    REQUIRE(r.cs.size() == 3 * 4096);

    SECTION("phase randomization produces boundary jumps, the amplitude model does not") {
        auto mean_jump_at = [](const std::vector<double>& x, const std::vector<std::size_t>& idx) {
            double m = 0.0;
            for (std::size_t i : idx) m += std::abs(x[i] - x[i - 1]);
            return m / static_cast<double>(idx.size());
        };
        std::vector<std::size_t> boundaries{4096, 2 * 4096};
        std::vector<std::size_t> interior;
        for (std::size_t i = 1; i < r.wss.size(); ++i) {
            if (i != 4096 && i != 2 * 4096) interior.push_back(i);
        }
        const double b_wss = mean_jump_at(r.wss, boundaries);
        const double i_wss = mean_jump_at(r.wss, interior);
        REQUIRE(b_wss > i_wss);
        // the amplitude-modulated record has no frame structure at all
        const double b_cs = mean_jump_at(r.cs, boundaries);
        const double i_cs = mean_jump_at(r.cs, interior);
        REQUIRE(b_cs < 4.0 * i_cs);
    }

    SECTION("csv rows all carry labels") {
        const std::string csv = waveforms_csv(r);
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line); // hash comment
        REQUIRE(line.rfind("# config_hash=", 0) == 0);
        std::getline(in, line);
        REQUIRE(line == "time_s,value,label");
        std::size_t rows = 0;
        while (std::getline(in, line)) {
            REQUIRE((line.size() >= 4 && (line.substr(line.size() - 4) == ",wss" ||
                                          line.substr(line.size() - 3) == ",cs")));
            ++rows;
        }
        REQUIRE(rows == r.wss.size() + r.cs.size());
    }
}

TEST_CASE("scd map experiment") {
    SilenceLogs quiet;
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::ScdMaps;
    cfg.sample_rate_hz = 8000.0;
    cfg.duration_s = 0.5;
    cfg.dft_len = 128;
    cfg.f0_hz = 115.0;
    cfg.num_harmonics = 3;
    cfg.alpha_max_hz = 300.0;
    cfg.realizations = 24;
    cfg.seed = 77;

    const ScdMapsResult r = run_scd_maps(cfg);
    const std::size_t zi = r.wss_avg.grid.zero_index();

    SECTION("averaging suppresses the phase-randomized model's off-zero rows") {
        auto off_over_ridge = [&](const CyclicSpectrum& s) {
            double ridge = 0.0, off = 0.0;
            for (std::size_t p = 0; p < s.num_alphas(); ++p) {
                for (std::size_t k = 0; k < s.num_bins(); ++k) {
                    const double v = std::abs(s.at(p, k));
                    if (p == zi) {
                        ridge = std::max(ridge, v);
                    } else {
                        off = std::max(off, v);
                    }
                }
            }
            return off / ridge;
        };
        REQUIRE(off_over_ridge(r.wss_avg) < 0.5 * off_over_ridge(r.cs_avg));
        REQUIRE(off_over_ridge(r.wss_avg) < off_over_ridge(r.wss_single));
    }

    SECTION("csv export is well formed") {
        const std::string csv = cyclic_spectrum_csv(r.cs_avg, true);
        REQUIRE(csv.rfind("alpha_hz,freq_hz,re,im\n", 0) == 0);
        const std::size_t lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
        REQUIRE(lines == 1 + r.cs_avg.num_alphas() * (r.cs_avg.num_bins() / 2 + 1));
    }

    SECTION("zero-amplitude models give empty-support maps") {
        ExperimentConfig zero = cfg;
        zero.realizations = 2;
        zero.wss_amp = 0.0;
        zero.amp_mean = 0.0;
        zero.amp_var = 0.0;
        const ScdMapsResult rz = run_scd_maps(zero);
        for (const auto& v : rz.wss_avg.values) REQUIRE(std::abs(v) == 0.0);
        for (const auto& v : rz.cs_avg.values) REQUIRE(std::abs(v) == 0.0);
    }

    SECTION("magnitude averaging mode differs from complex averaging") {
        ExperimentConfig mag = cfg;
        mag.avg_mode = ScdAvgMode::Magnitude;
        const ScdMapsResult rm = run_scd_maps(mag);
        // same single-realization map, different averaged map
        REQUIRE(rm.wss_single.values == r.wss_single.values);
        REQUIRE(rm.wss_avg.values != r.wss_avg.values);
        for (const auto& v : rm.wss_avg.values) {
            REQUIRE(v.imag() == 0.0);
            REQUIRE(v.real() >= 0.0);
        }
    }
}

TEST_CASE("output directory management") {
    SilenceLogs quiet;
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "cyclodsp_outdir_test";
    fs::remove_all(dir);

    ExperimentConfig cfg = tiny_sweep_config();
    const SweepResult r = run_sysid_sweep(cfg);
    write_sweep_outputs(r, dir.string(), false);
    REQUIRE(fs::exists(dir / "results.csv"));
    REQUIRE(fs::exists(dir / "results.json"));
    REQUIRE(fs::exists(dir / "meta.json"));

    SECTION("rewriting with the same config succeeds") {
        REQUIRE_NOTHROW(write_sweep_outputs(r, dir.string(), false));
    }
    SECTION("a different config is refused without force") {
        ExperimentConfig other = cfg;
        other.seed += 99;
        SweepResult r2 = run_sysid_sweep(other);
        REQUIRE_THROWS_AS(write_sweep_outputs(r2, dir.string(), false), OutputDirMismatch);
        REQUIRE_NOTHROW(write_sweep_outputs(r2, dir.string(), true));
    }
    SECTION("results csv embeds the config hash") {
        std::ifstream f(dir / "results.csv");
        std::string first;
        std::getline(f, first);
        REQUIRE(first == "# config_hash=" + config_hash_hex(cfg));
    }
}

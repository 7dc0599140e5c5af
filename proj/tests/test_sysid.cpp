#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "cyclodsp/io.hpp"
#include "cyclodsp/log.hpp"
#include "cyclodsp/pitch.hpp"
#include "cyclodsp/rng.hpp"
#include "cyclodsp/synth.hpp"
#include "cyclodsp/sysid.hpp"
#include "helpers.hpp"

using namespace cyclodsp;

namespace {

struct SilenceLogs {
    std::ostream* prev;
    SilenceLogs() : prev(log_sink()) { log_sink() = nullptr; }
    ~SilenceLogs() { log_sink() = prev; }
};

Signal white_noise(std::size_t n, double fs, Rng& rng) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.gaussian();
    return Signal::from_real(x, fs);
}

LtiSystem short_fir(std::size_t taps, std::size_t dft_len, Rng& rng) {
    // known short filter zero-padded to the analysis length
    std::vector<double> a(dft_len, 0.0);
    double e = 0.0;
    for (std::size_t i = 0; i < taps; ++i) {
        a[i] = rng.uniform(-1.0, 1.0) * std::exp(-10.0 * static_cast<double>(i) / static_cast<double>(taps));
        e += a[i] * a[i];
    }
    for (auto& v : a) v /= std::sqrt(e);
    LtiSystem sys;
    sys.impulse_response = a;
    sys.freq_response.assign(a.begin(), a.end());
    cached_fft_plan(dft_len).forward(sys.freq_response.data());
    return sys;
}

Signal cs_excitation(double f0, double fs, std::size_t n, Rng& rng, double cap_hz = 4000.0) {
    HarmonicModelSpec spec;
    spec.omega0 = 2.0 * std::numbers::pi * f0 / fs;
    spec.num_harmonics_H = static_cast<std::size_t>(std::floor(cap_hz / f0));
    spec.amplitudes_b.assign(spec.num_harmonics_H, 1.0);
    spec.phases_phi.resize(spec.num_harmonics_H);
    for (auto& p : spec.phases_phi) p = rng.uniform(-std::numbers::pi, std::numbers::pi);
    spec.amp_process = {0.5, std::sqrt(10.0), static_cast<std::size_t>(0.1 * fs)};
    return gen_cs_harmonic(spec, n, fs, rng);
}

CycleSet gt_cycles(double f0, double fs, std::size_t n, const StftParams& p, double cap_hz = 4000.0) {
    const std::size_t L = frame_count(n, p.dft_len_K, p.hop_R);
    const CyclicFreqGrid grid = CyclicFreqGrid::from_targets({}, L, p.hop_R);
    return build_cycle_set(ground_truth_track(f0, fs), grid, cap_hz);
}

} // namespace

TEST_CASE("wiener estimator") {
    SilenceLogs quiet;
    const double fs = 16000.0;

    SECTION("identity system: a_hat = 1 at every powered bin") {
        Rng rng(71);
        const Signal z = white_noise(20000, fs, rng);
        IoRecord rec{z, z, std::nullopt};
        const StftParams p{64, 21, WindowKind::Hann};
        const TransferEstimate est = estimate_wiener(rec, p);
        const auto psd = welch_psd(z, p);
        double pmax = 0.0;
        for (double v : psd) pmax = std::max(pmax, v);
        for (std::size_t k = 0; k < est.num_bins(); ++k) {
            if (psd[k] > 1e-6 * pmax) {
                REQUIRE(std::abs(est.a_hat[k] - cdouble{1.0, 0.0}) < 1e-6);
            }
        }
    }

    SECTION("white-noise excitation of a short known filter converges") {
        Rng rng(72);
        const std::size_t K = 256, N = 1 << 18;
        const LtiSystem sys = short_fir(16, K, rng);
        const Signal z = white_noise(N, fs, rng);
        const Signal x = apply_system(sys, z);
        IoRecord rec{z, x, sys};
        const TransferEstimate est = estimate_wiener(rec, StftParams{K, K / 3, WindowKind::Hann});
        double worst = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            worst = std::max(worst, std::abs(est.a_hat[k] - sys.freq_response[k]));
        }
        REQUIRE(worst < 0.05);
    }

    SECTION("stationary input noise at equal power halves the estimate") {
        Rng rng(73);
        const std::size_t K = 128, N = 1 << 18;
        const LtiSystem sys = short_fir(12, K, rng);
        const Signal s = white_noise(N, fs, rng);
        const Signal x = apply_system(sys, s);
        const Signal z = add_noise_at_snr(s, 0.0, rng); // input noise only
        IoRecord rec{z, x, sys};
        const TransferEstimate est = estimate_wiener(rec, StftParams{K, K / 3, WindowKind::Hann});
        // bias factor S_s / (S_s + S_n) = 1/2 at equal white powers
        double ratio = 0.0;
        std::size_t cnt = 0;
        for (std::size_t k = 1; k < K / 2; ++k) {
            if (std::abs(sys.freq_response[k]) > 0.3) {
                ratio += std::abs(est.a_hat[k]) / std::abs(sys.freq_response[k]);
                ++cnt;
            }
        }
        ratio /= static_cast<double>(cnt);
        REQUIRE(ratio == Catch::Approx(0.5).margin(0.04));
    }

    SECTION("all-zero input is rejected as degenerate") {
        const Signal z = Signal::from_real(std::vector<double>(1000, 0.0), fs);
        IoRecord rec{z, z, std::nullopt};
        REQUIRE_THROWS_AS(estimate_wiener(rec, StftParams{64, 21, WindowKind::Hann}), std::invalid_argument);
    }
}

TEST_CASE("cyclic estimator") {
    SilenceLogs quiet;
    const double fs = 16000.0;

    SECTION("single zero cycle reproduces the Wiener estimate bit for bit") {
        Rng rng(74);
        const std::size_t K = 64, N = 12000;
        const Signal s = cs_excitation(150.0, fs, N, rng);
        const LtiSystem sys = short_fir(10, K, rng);
        const Signal x = add_noise_at_snr(apply_system(sys, s), 40.0, rng);
        const Signal z = add_noise_at_snr(s, 0.0, rng);
        IoRecord rec{z, x, sys};
        const StftParams p{K, K / 3, WindowKind::Hann};

        CycleSet zero_only;
        zero_only.alphas = {0.0};
        zero_only.harmonic = {0};
        zero_only.delta_alpha = 1.0;
        const TransferEstimate c = estimate_cyclic(rec, p, zero_only);
        const TransferEstimate w = estimate_wiener(rec, p);
        REQUIRE(c.a_hat == w.a_hat);
        for (std::size_t k = 0; k < K; ++k) REQUIRE(c.beta_at(0, k) == 1.0);
    }

    SECTION("weights are a per-bin convex combination") {
        Rng rng(75);
        const std::size_t K = 128, N = 16000;
        const double f0 = 132.0;
        const Signal s = cs_excitation(f0, fs, N, rng);
        const LtiSystem sys = short_fir(16, K, rng);
        const Signal x = add_noise_at_snr(apply_system(sys, s), 40.0, rng);
        const Signal z = add_noise_at_snr(s, 0.0, rng);
        IoRecord rec{z, x, sys};
        const StftParams p{K, K / 3, WindowKind::Hann};
        const CycleSet cycles = gt_cycles(f0, fs, N, p);
        const TransferEstimate est = estimate_cyclic(rec, p, cycles);

        REQUIRE(est.num_cycles() == cycles.size());
        for (std::size_t k = 0; k < K; ++k) {
            double sum = 0.0;
            for (std::size_t pi = 0; pi < est.num_cycles(); ++pi) {
                const double b = est.beta_at(pi, k);
                REQUIRE(b >= 0.0);
                sum += b;
            }
            REQUIRE(sum == Catch::Approx(1.0).margin(1e-9));
        }
    }

    SECTION("scale equivariance: scaling the output scales both estimates") {
        Rng rng(76);
        const std::size_t K = 64, N = 8000;
        const double f0 = 140.0;
        const Signal s = cs_excitation(f0, fs, N, rng);
        const LtiSystem sys = short_fir(8, K, rng);
        const Signal x = add_noise_at_snr(apply_system(sys, s), 40.0, rng);
        const Signal z = add_noise_at_snr(s, 0.0, rng);
        const double c = 3.7;
        std::vector<cdouble> xs(x.samples);
        for (auto& v : xs) v *= c;
        IoRecord rec{z, x, sys};
        IoRecord rec_scaled{z, Signal(xs, fs), sys};
        const StftParams p{K, K / 3, WindowKind::Hann};
        const CycleSet cycles = gt_cycles(f0, fs, N, p);

        const TransferEstimate w1 = estimate_wiener(rec, p);
        const TransferEstimate w2 = estimate_wiener(rec_scaled, p);
        const TransferEstimate c1 = estimate_cyclic(rec, p, cycles);
        const TransferEstimate c2 = estimate_cyclic(rec_scaled, p, cycles);
        for (std::size_t k = 0; k < K; ++k) {
            REQUIRE(std::abs(w2.a_hat[k] - c * w1.a_hat[k]) < 1e-9 * (1.0 + std::abs(w1.a_hat[k])));
            REQUIRE(std::abs(c2.a_hat[k] - c * c1.a_hat[k]) < 1e-9 * (1.0 + std::abs(c1.a_hat[k])));
        }
    }

    SECTION("noiseless bin-aligned excitation: both estimators hit the truth") {
        Rng rng(77);
        const std::size_t K = 256, N = 16000;
        const double f0 = 125.0; // exactly bin 2 at K = 256, fs = 16 kHz
        const Signal s = cs_excitation(f0, fs, N, rng);
        const LtiSystem sys = [&] {
            Rng r2(78);
            return gen_lti_system(K, r2);
        }();
        const Signal x = apply_system(sys, s);
        IoRecord rec{s, x, sys};
        const StftParams p{K, K / 3, WindowKind::Hann};
        const CycleSet cycles = gt_cycles(f0, fs, N, p);
        const auto bins = harmonic_eval_bins(cycles, K);
        REQUIRE(!bins.empty());
        const TransferEstimate w = estimate_wiener(rec, p);
        const TransferEstimate c = estimate_cyclic(rec, p, cycles);
        REQUIRE(rmse(w, sys, bins) < 0.05);
        REQUIRE(rmse(c, sys, bins) < 0.05);
    }

    SECTION("input-noise invariance of nonzero cycles of the input auto-SCD") {
        // |S_zz(omega, alpha != 0)| with stationary input noise stays within
        // estimation error of the noiseless value, trial averaged
        const std::size_t K = 128, N = 12000;
        const double f0 = 150.0;
        const StftParams p{K, K / 3, WindowKind::Hann};
        const std::size_t L = frame_count(N, K, p.hop_R);
        const CyclicFreqGrid grid = CyclicFreqGrid::from_targets(
            {snap_to_grid(2.0 * std::numbers::pi * f0 / fs, L, p.hop_R),
             snap_to_grid(2.0 * std::numbers::pi * 2.0 * f0 / fs, L, p.hop_R)},
            L, p.hop_R);
        const std::size_t M = 14;
        std::vector<double> diffs;
        double clean_scale = 0.0;
        for (std::size_t t = 0; t < M; ++t) {
            Rng rng(800 + t);
            const Signal s = cs_excitation(f0, fs, N, rng);
            const Signal z = add_noise_at_snr(s, 0.0, rng);
            const CyclicSpectrum clean = acp_estimate(s, s, p, grid);
            const CyclicSpectrum noisy = acp_estimate(z, z, p, grid);
            for (std::size_t pi = 0; pi < grid.size(); ++pi) {
                if (grid.alphas[pi] == 0.0) continue;
                for (std::size_t k = 0; k < K; ++k) {
                    const double c = std::abs(clean.at(pi, k));
                    clean_scale = std::max(clean_scale, c);
                }
                // compare the strongest cell of each row
                std::size_t kmax = 0;
                for (std::size_t k = 1; k < K; ++k) {
                    if (std::abs(clean.at(pi, k)) > std::abs(clean.at(pi, kmax))) kmax = k;
                }
                diffs.push_back(std::abs(noisy.at(pi, kmax)) - std::abs(clean.at(pi, kmax)));
            }
        }
        double m = 0.0, v = 0.0;
        for (double d : diffs) m += d;
        m /= static_cast<double>(diffs.size());
        for (double d : diffs) v += (d - m) * (d - m);
        v /= static_cast<double>(diffs.size() - 1);
        const double se = std::sqrt(v / static_cast<double>(diffs.size()));
        REQUIRE(std::abs(m) < 4.0 * se);
    }

    SECTION("empty cycle set is rejected") {
        Rng rng(79);
        const Signal s = white_noise(2000, fs, rng);
        IoRecord rec{s, s, std::nullopt};
        CycleSet empty;
        REQUIRE_THROWS_AS(estimate_cyclic(rec, StftParams{64, 21, WindowKind::Hann}, empty),
                          std::invalid_argument);
    }
}

TEST_CASE("rmse") {
    const std::size_t K = 8;
    LtiSystem sys;
    sys.impulse_response.assign(K, 0.0);
    sys.freq_response = {cdouble{1, 0}, cdouble{0.5, 0.5}, cdouble{-1, 2}, cdouble{0, 0},
                         cdouble{2, -1}, cdouble{1, 1},   cdouble{0, 3},  cdouble{4, 0}};
    TransferEstimate est;
    est.a_hat = sys.freq_response;

    SECTION("estimate equal to truth gives zero") {
        REQUIRE(rmse(est, sys, {0, 1, 2, 3, 4, 5, 6, 7}) == 0.0);
    }
    SECTION("uniform complex offset c gives |c|") {
        const cdouble c{0.3, -0.4};
        for (auto& v : est.a_hat) v += c;
        REQUIRE(rmse(est, sys, {1, 3, 6}) == Catch::Approx(0.5).epsilon(1e-12));
    }
    SECTION("three-bin value matches the direct formula") {
        est.a_hat[1] += cdouble{0.1, 0.0};
        est.a_hat[4] += cdouble{0.0, -0.2};
        est.a_hat[6] += cdouble{-0.3, 0.1};
        const double want = std::sqrt((0.01 + 0.04 + 0.1) / 3.0);
        REQUIRE(rmse(est, sys, {1, 4, 6}) == Catch::Approx(want).epsilon(1e-12));
    }
    SECTION("empty bin set is rejected") {
        REQUIRE_THROWS_AS(rmse(est, sys, {}), std::invalid_argument);
    }
}

TEST_CASE("transfer estimate export") {
    SilenceLogs quiet;
    Rng rng(80);
    const double fs = 16000.0;
    const Signal z = white_noise(4000, fs, rng);
    const Signal x = apply_system(short_fir(8, 32, rng), z);
    IoRecord rec{z, x, std::nullopt};
    const StftParams p{32, 10, WindowKind::Hann};
    const TransferEstimate est = estimate_wiener(rec, p);

    SECTION("csv carries one labeled row per bin") {
        const std::string csv = transfer_estimate_csv(est, fs);
        REQUIRE(csv.rfind("freq_hz,re,im,mag,method\n", 0) == 0);
        REQUIRE(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == 1 + 32);
        REQUIRE(csv.find(",wiener\n") != std::string::npos);
    }
    SECTION("json carries the weight diagnostics") {
        const auto j = transfer_estimate_json(est, fs);
        REQUIRE(j["method"] == "wiener");
        REQUIRE(j["a_hat_re"].size() == 32);
        REQUIRE(j["beta"].size() == 1);
        REQUIRE(j["beta"][0].size() == 32);
        REQUIRE(j["coherence_sq"].size() == 1);
    }
}

TEST_CASE("evaluation bins") {
    const double fs = 16000.0;
    const StftParams p{256, 85, WindowKind::Hann};
    const CycleSet cycles = gt_cycles(125.0, fs, 16000, p);
    const auto bins = harmonic_eval_bins(cycles, 256);
    REQUIRE(!bins.empty());
    // 125 Hz at K = 256 / 16 kHz: harmonics land on even bins 2, 4, 6, ...
    for (std::size_t i = 0; i < bins.size(); ++i) {
        REQUIRE(bins[i] == 2 * (i + 1));
    }
    const auto all = all_eval_bins(256);
    REQUIRE(all.front() == 1);
    REQUIRE(all.back() == 127);
}

#include <catch_amalgamated.hpp>

#include <complex>
#include <vector>

#include "cyclodsp/fft.hpp"
#include "cyclodsp/rng.hpp"
#include "helpers.hpp"

using namespace cyclodsp;
using testutil::naive_dft;

TEST_CASE("fft matches the naive DFT for power-of-two and odd sizes") {
    Rng rng(11);
    for (std::size_t n : {1u, 2u, 4u, 8u, 64u, 256u, 3u, 5u, 12u, 100u, 257u}) {
        std::vector<cdouble> x = testutil::random_complex(n, rng);
        const std::vector<cdouble> want = naive_dft(x);
        const std::vector<cdouble> got = fft(x);
        const double scale = testutil::max_abs(want) + 1.0;
        REQUIRE(testutil::max_abs_diff(want, got) / scale < 1e-11);
    }
}

TEST_CASE("ifft inverts fft") {
    Rng rng(12);
    for (std::size_t n : {16u, 60u, 255u}) {
        const std::vector<cdouble> x = testutil::random_complex(n, rng);
        const std::vector<cdouble> back = ifft(fft(x));
        REQUIRE(testutil::max_abs_diff(x, back) < 1e-12);
    }
}

TEST_CASE("linear_convolve matches the direct sum") {
    Rng rng(13);
    const std::vector<double> a = testutil::random_real(17, rng);
    const std::vector<double> b = testutil::random_real(40, rng);
    const std::vector<double> got = linear_convolve(a, b);
    REQUIRE(got.size() == a.size() + b.size() - 1);
    for (std::size_t n = 0; n < got.size(); ++n) {
        double want = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (n >= i && n - i < b.size()) want += a[i] * b[n - i];
        }
        REQUIRE(std::abs(got[n] - want) < 1e-12);
    }
}

TEST_CASE("zero-size plan is rejected") {
    REQUIRE_THROWS_AS(FftPlan(0), std::invalid_argument);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "freqdyn/fft.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

using namespace freqdyn;

namespace {

// Direct-summation DFT, the independent oracle for the FFT path.
std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double a = -2.0 * std::numbers::pi * static_cast<double>(k) * static_cast<double>(j) /
                             static_cast<double>(n);
            acc += x[j] * std::complex<double>(std::cos(a), std::sin(a));
        }
        out[k] = acc;
    }
    return out;
}

std::vector<double> random_signal(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> x(n);
    for (auto& v : x) v = dist(rng);
    return x;
}

} // namespace

TEST_CASE("rfft matches the direct DFT on assorted sizes") {
    for (std::size_t n : {8u, 15u, 64u, 100u, 243u, 360u}) {
        const auto x = random_signal(n, static_cast<unsigned>(n));
        const auto fast = fft::rfft(x);
        const auto slow = naive_dft(x);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t k = 0; k < fast.size(); ++k)
            CHECK(std::abs(fast[k] - slow[k]) < 1e-8 * static_cast<double>(n));
    }
}

TEST_CASE("irfft inverts rfft") {
    for (std::size_t n : {16u, 81u, 250u, 1000u}) {
        const auto x = random_signal(n, 7u + static_cast<unsigned>(n));
        const auto spec = fft::rfft(x);
        const auto back = fft::irfft(spec, n);
        REQUIRE(back.size() == n);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
    }
}

TEST_CASE("pure tone lands in its bin") {
    const std::size_t n = 480;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = std::cos(2.0 * std::numbers::pi * 12.0 * static_cast<double>(i) / static_cast<double>(n));
    const auto spec = fft::rfft(x);
    CHECK(std::abs(spec[12]) == doctest::Approx(static_cast<double>(n) / 2.0).epsilon(1e-10));
    CHECK(std::abs(spec[11]) < 1e-9);
    CHECK(std::abs(spec[13]) < 1e-9);
}

TEST_CASE("rfft argument checks") {
    CHECK_THROWS_AS((void)fft::rfft(std::vector<double>{}), std::invalid_argument);
    std::vector<std::complex<double>> bad(3);
    CHECK_THROWS_AS((void)fft::irfft(bad, 8), std::invalid_argument);
}

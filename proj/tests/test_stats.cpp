#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "freqdyn/stats.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace freqdyn;

namespace {

TimeSeries series_of(std::vector<double> values, Rate rate = Rate(1)) {
    return make_series(0, rate, std::move(values));
}

// Brute-force oracles in long double, structured independently of the
// library's accumulation paths.
long double oracle_mean(const std::vector<double>& x) {
    long double s = 0.0L;
    for (double v : x) s += v;
    return s / static_cast<long double>(x.size());
}

double oracle_std(const std::vector<double>& x) {
    const long double m = oracle_mean(x);
    long double acc = 0.0L;
    for (double v : x) acc += (v - m) * (v - m);
    return static_cast<double>(std::sqrt(acc / static_cast<long double>(x.size())));
}

double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const long double mx = oracle_mean(x), my = oracle_mean(y);
    long double sxy = 0.0L, sxx = 0.0L, syy = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

double oracle_skewness(const std::vector<double>& x) {
    const long double m = oracle_mean(x);
    long double m2 = 0.0L, m3 = 0.0L;
    for (double v : x) {
        m2 += (v - m) * (v - m);
        m3 += (v - m) * (v - m) * (v - m);
    }
    const long double n = static_cast<long double>(x.size());
    m2 /= n;
    m3 /= n;
    if (m2 <= 0.0L) return 0.0;
    const long double g1 = m3 / std::pow(m2, 1.5L);
    return static_cast<double>(g1 * std::sqrt(n * (n - 1.0L)) / (n - 2.0L));
}

std::vector<double> random_vector(std::mt19937& rng, std::size_t n, double lo = -2.0, double hi = 2.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> x(n);
    for (auto& v : x) v = dist(rng);
    return x;
}

} // namespace

TEST_CASE("std_dev basics") {
    CHECK(std_dev(series_of(std::vector<double>(10, 60.0))) == 0.0);
    CHECK(std_dev(series_of({59.9, 60.1})) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK_THROWS_AS((void)std_dev(series_of({1.0})), std::invalid_argument);
}

TEST_CASE("std_dev of unit-variance noise is near 1") {
    std::mt19937 rng(21);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> x(1000);
    for (auto& v : x) v = dist(rng);
    CHECK(std_dev(series_of(std::move(x))) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("std_dev skips gap samples") {
    std::vector<double> v{59.9, 0.0, 60.1};
    std::vector<std::uint8_t> mask{0, 1, 0};
    const auto s = make_series(0, Rate(1), std::move(v), std::move(mask));
    CHECK(std_dev(s) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("normalize_across_groups") {
    const double in[] = {0.02, 0.04, 0.06};
    const auto r = normalize_across_groups(in);
    CHECK_FALSE(r.degenerate);
    CHECK(r.values[0] == doctest::Approx(0.0));
    CHECK(r.values[1] == doctest::Approx(0.5));
    CHECK(r.values[2] == doctest::Approx(1.0));

    const double single[] = {5.0};
    const auto d = normalize_across_groups(single);
    CHECK(d.degenerate);
    CHECK(d.values == std::vector<double>{0.0});

    // Affine invariance.
    std::mt19937 rng(2);
    const auto x = random_vector(rng, 12);
    auto y = x;
    for (auto& v : y) v = 3.5 * v - 7.0;
    const auto rx = normalize_across_groups(x);
    const auto ry = normalize_across_groups(y);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(ry.values[i] == doctest::Approx(rx.values[i]).epsilon(1e-12));
}

TEST_CASE("histogram skewness signs and symmetry") {
    const auto sym = histogram(series_of({-1.0, 0.0, 1.0}), 0.5);
    CHECK(sym.skewness == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sym.total == 3);

    const auto pos = histogram(series_of({0.0, 0.0, 0.0, 10.0}), 1.0);
    CHECK(pos.skewness > 0.0);

    CHECK_THROWS_AS((void)histogram(series_of({1.0}), 0.0), std::invalid_argument);
}

TEST_CASE("histogram total preserved and bins cover the data range") {
    std::mt19937 rng(31);
    const auto x = random_vector(rng, 500, -3.0, 3.0);
    const auto h = build_histogram(x, 0.25);
    CHECK(h.total == x.size());
    std::size_t count_sum = 0;
    for (auto c : h.counts) count_sum += c;
    CHECK(count_sum == x.size());
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    CHECK(h.bin_low(0) <= *lo);
    CHECK(h.bin_high(h.counts.size() - 1) > *hi);
    CHECK(h.counts.front() > 0);
    CHECK(h.counts.back() > 0);
}

TEST_CASE("skewness of a skew-normal sample matches the closed form") {
    // X = delta*|Z0| + sqrt(1-delta^2)*Z1 has the known analytic skewness.
    const double a = 5.0;
    const double delta = a / std::sqrt(1.0 + a * a);
    const double b = delta * std::sqrt(2.0 / std::numbers::pi);
    const double analytic = (4.0 - std::numbers::pi) / 2.0 * std::pow(b, 3.0) /
                            std::pow(1.0 - 2.0 * delta * delta / std::numbers::pi, 1.5);
    std::mt19937 rng(1234);
    std::normal_distribution<double> norm(0.0, 1.0);
    std::vector<double> x(100000);
    for (auto& v : x)
        v = delta * std::abs(norm(rng)) + std::sqrt(1.0 - delta * delta) * norm(rng);
    CHECK(std::abs(sample_skewness(x) - analytic) < 0.05);
}

TEST_CASE("pearson canonical values") {
    const std::vector<double> x{1.0, 2.0, 3.0};
    std::vector<double> y{2.0, 4.0, 6.0};
    CHECK(pearson(x, y) == doctest::Approx(1.0).epsilon(1e-12));
    y = {6.0, 4.0, 5.0};
    CHECK(pearson(x, y) == doctest::Approx(-0.5).epsilon(1e-12));
    y = {-1.0 + 7.0, -2.0 + 7.0, -3.0 + 7.0};
    CHECK(pearson(x, y) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK_THROWS_AS((void)pearson(x, std::vector<double>{1.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)pearson(x, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("pearson symmetry and affine equivariance") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const auto x = random_vector(rng, 16);
        const auto y = random_vector(rng, 16);
        const double r = pearson(x, y);
        CHECK(std::abs(r) <= 1.0 + 1e-12);
        CHECK(pearson(y, x) == doctest::Approx(r).epsilon(1e-12));
        auto xs = x;
        auto ys = y;
        for (auto& v : xs) v = -2.0 * v + 1.0;
        for (auto& v : ys) v = 3.0 * v - 4.0;
        CHECK(pearson(xs, ys) == doctest::Approx(-r).epsilon(1e-9));
    }
}

TEST_CASE("stats agree with brute-force oracles on random small vectors") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<std::size_t> len(4, 32);
        const std::size_t n = len(rng);
        const auto x = random_vector(rng, n);
        const auto y = random_vector(rng, n);
        CHECK(std_dev(x) == doctest::Approx(oracle_std(x)).epsilon(1e-10));
        CHECK(pearson(x, y) == doctest::Approx(oracle_pearson(x, y)).epsilon(1e-10));
        CHECK(sample_skewness(x) == doctest::Approx(oracle_skewness(x)).epsilon(1e-10));
    }
}

TEST_CASE("acf of a pure sinusoid recovers the period") {
    const std::size_t period = 25;
    std::vector<double> x(1000);
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(period));
    const auto r = acf(series_of(std::move(x)), 2 * period);
    CHECK(r[0] == 1.0);
    CHECK(r[period] >= 0.99);
    // Oracle: cosine autocorrelation at half period is about -1.
    CHECK(r[period / 2 + 1] < -0.5);
}

TEST_CASE("acf of white noise vanishes beyond lag zero") {
    std::mt19937 rng(7);
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<double> x(10000);
    for (auto& v : x) v = dist(rng);
    const auto r = acf(series_of(std::move(x)), 40);
    CHECK(r[0] == 1.0);
    for (std::size_t lag = 1; lag < r.size(); ++lag) CHECK(std::abs(r[lag]) < 0.05);
}

TEST_CASE("acf matches per-lag pearson oracle") {
    std::mt19937 rng(123);
    const auto x = random_vector(rng, 64);
    const auto s = series_of(std::vector<double>(x));
    const auto r = acf(s, 10);
    for (std::size_t lag = 1; lag <= 10; ++lag) {
        std::vector<double> head(x.begin(), x.end() - static_cast<std::ptrdiff_t>(lag));
        std::vector<double> tail(x.begin() + static_cast<std::ptrdiff_t>(lag), x.end());
        CHECK(r[lag] == doctest::Approx(oracle_pearson(head, tail)).epsilon(1e-10));
    }
}

TEST_CASE("acf error cases") {
    CHECK_THROWS_AS((void)acf(series_of(std::vector<double>(50, 3.0)), 5), std::invalid_argument);
    CHECK_THROWS_AS((void)acf(series_of({1.0, 2.0, 3.0}), 5), std::invalid_argument);
}

TEST_CASE("correlate_fluctuation_drivers") {
    // sigma constructed as an affine function of penetration.
    std::vector<double> pen, inertia, sigma;
    for (int h = 0; h < 24; ++h) {
        pen.push_back(50.0 + 2.0 * h);
        inertia.push_back(40000.0 - 500.0 * h);
        sigma.push_back(0.001 + 0.0001 * pen.back());
    }
    const auto r = correlate_fluctuation_drivers(sigma, inertia, pen);
    CHECK(r.r_ibr == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.r_inertia == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(r.n_hours == 24);

    // Independent white sequences stay near zero.
    std::mt19937 rng(55);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> s2(1000), h2(1000), p2(1000);
    for (std::size_t i = 0; i < 1000; ++i) {
        s2[i] = u(rng);
        h2[i] = u(rng);
        p2[i] = u(rng);
    }
    const auto r2 = correlate_fluctuation_drivers(s2, h2, p2);
    CHECK(std::abs(r2.r_ibr) < 0.1);
    CHECK(std::abs(r2.r_inertia) < 0.1);

    CHECK_THROWS_AS((void)correlate_fluctuation_drivers(std::vector<double>{1.0, 2.0},
                                                        std::vector<double>{1.0, 2.0},
                                                        std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("windowed_std splits into equal blocks") {
    std::vector<double> v;
    for (int block = 0; block < 3; ++block)
        for (int i = 0; i < 4; ++i) v.push_back(block == 1 ? (i % 2 ? 1.0 : -1.0) : 0.0);
    const auto s = windowed_std(series_of(std::move(v)), 4);
    REQUIRE(s.size() == 3);
    CHECK(s[0] == 0.0);
    CHECK(s[1] == doctest::Approx(1.0));
    CHECK(s[2] == 0.0);
}

TEST_CASE("spectrum_peaks finds an injected tone over noise") {
    const double rate = 30.0;
    const std::size_t n = 30 * 60;
    std::mt19937 rng(77);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rate;
        x[i] = 60.0 + 0.05 * std::sin(2.0 * std::numbers::pi * 2.5 * t) + noise(rng);
    }
    const auto peaks = spectrum_peaks(series_of(std::move(x), Rate(30)), 0.01);
    REQUIRE_FALSE(peaks.empty());
    const double bin = rate / static_cast<double>(n);
    CHECK(std::abs(peaks[0].freq_hz - 2.5) <= bin + 1e-12);
    CHECK(peaks[0].amplitude == doctest::Approx(0.05).epsilon(0.25));
}

TEST_CASE("spectrum of pure DC has no peaks") {
    const auto peaks = spectrum_peaks(series_of(std::vector<double>(256, 60.0), Rate(30)), 1e-9);
    CHECK(peaks.empty());
}

TEST_CASE("two equal tones report comparable amplitudes") {
    const double rate = 30.0;
    const std::size_t n = 1800;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rate;
        x[i] = 0.04 * std::sin(2.0 * std::numbers::pi * 0.3 * t) +
               0.04 * std::sin(2.0 * std::numbers::pi * 2.5 * t);
    }
    const auto peaks = spectrum_peaks(series_of(std::move(x), Rate(30)), 0.01);
    REQUIRE(peaks.size() >= 2);
    const double ratio = peaks[0].amplitude / peaks[1].amplitude;
    CHECK(ratio < 1.1);
    CHECK(ratio > 0.9);
    std::vector<double> freqs{peaks[0].freq_hz, peaks[1].freq_hz};
    std::sort(freqs.begin(), freqs.end());
    CHECK(freqs[0] == doctest::Approx(0.3).epsilon(0.05));
    CHECK(freqs[1] == doctest::Approx(2.5).epsilon(0.01));
}

TEST_CASE("spectrum peaks ignore a constant offset") {
    const double rate = 30.0;
    const std::size_t n = 900;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = 0.03 * std::sin(2.0 * std::numbers::pi * 1.5 * static_cast<double>(i) / rate);
    auto shifted = x;
    for (auto& v : shifted) v += 60.0;
    const auto p1 = spectrum_peaks(series_of(std::move(x), Rate(30)), 0.005);
    const auto p2 = spectrum_peaks(series_of(std::move(shifted), Rate(30)), 0.005);
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i) {
        CHECK(p1[i].freq_hz == doctest::Approx(p2[i].freq_hz).epsilon(1e-12));
        CHECK(p1[i].amplitude == doctest::Approx(p2[i].amplitude).epsilon(1e-6));
    }
}

TEST_CASE("spectrum rejects short input") {
    CHECK_THROWS_AS((void)spectrum_peaks(series_of(std::vector<double>(32, 1.0)), 0.1),
                    std::invalid_argument);
}

TEST_CASE("stat report serializes to JSON") {
    StatReport rep{"std_dev", 0.0123, 0, 3600000, "pmu_NE.csv"};
    const auto j = stat_report_json(rep);
    CHECK(j.find("\"metric\": \"std_dev\"") != std::string::npos);
    CHECK(j.find("0.0123") != std::string::npos);
    CHECK(j.find("schema_version") != std::string::npos);
}

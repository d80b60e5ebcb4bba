#ifndef FREQDYN_STATS_HPP
#define FREQDYN_STATS_HPP

#include "freqdyn/timeseries.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace freqdyn {

/// Half-open bins [k·w, (k+1)·w) anchored at multiples of the width;
/// counts[i] covers bin k = first_bin + i. Bins span the data range exactly.
struct Histogram {
    double bin_width = 0.0;
    std::int64_t first_bin = 0;
    std::vector<std::size_t> counts;
    std::size_t total = 0;
    double skewness = 0.0;   // adjusted Fisher–Pearson sample skewness

    double bin_low(std::size_t i) const { return (static_cast<double>(first_bin) + static_cast<double>(i)) * bin_width; }
    double bin_high(std::size_t i) const { return bin_low(i) + bin_width; }
};

Histogram build_histogram(std::span<const double> values, double bin_width);

/// Streaming histogram + moment accumulator with the same bin semantics,
/// for datasets assembled window by window.
class HistogramAccumulator {
public:
    explicit HistogramAccumulator(double bin_width);
    void add(std::span<const double> values);
    Histogram finalize() const;

    std::size_t count() const { return n_; }
    double mean() const { return n_ ? s1_ / static_cast<double>(n_) : 0.0; }
    double variance() const;   // population

private:
    double bin_width_;
    std::int64_t min_bin_ = 0;
    std::int64_t max_bin_ = 0;
    bool any_ = false;
    std::vector<std::size_t> counts_;
    std::size_t n_ = 0;
    double s1_ = 0.0, s2_ = 0.0, s3_ = 0.0;

    void ensure_bin(std::int64_t bin);
};

double sample_skewness(std::span<const double> values);
double skewness_from_power_sums(std::size_t n, double s1, double s2, double s3);

/// Population standard deviation over non-gap samples; needs ≥ 2 of them.
double std_dev(const TimeSeries& series);
double std_dev(std::span<const double> values);

struct NormalizeResult {
    std::vector<double> values;   // (v − min)/(max − min)
    bool degenerate = false;      // all inputs equal → all zeros
};
NormalizeResult normalize_across_groups(std::span<const double> values);

/// Histogram over non-gap samples with skewness attached.
Histogram histogram(const TimeSeries& series, double bin_width);

/// Linear correlation coefficient; throws if either input is constant.
double pearson(std::span<const double> x, std::span<const double> y);

struct DriverCorrelation {
    double r_inertia = 0.0;
    double r_ibr = 0.0;
    std::size_t n_hours = 0;
};

/// Pearson of hourly σ_f against each driver over aligned hours (≥ 3).
DriverCorrelation correlate_fluctuation_drivers(std::span<const double> sigma_f,
                                                std::span<const double> inertia,
                                                std::span<const double> penetration);

/// r(τ) for τ = 0..max_lag, each the Pearson correlation of the series with
/// its τ-shifted copy over the overlapping span; r(0) = 1. A lag window that
/// degenerates to a constant contributes r = 0.
std::vector<double> acf(const TimeSeries& series, std::size_t max_lag);

/// Population std per consecutive block of window_samples (tail dropped).
std::vector<double> windowed_std(const TimeSeries& series, std::size_t window_samples);

struct SpectrumPeak {
    double freq_hz = 0.0;
    double amplitude = 0.0;
    double prominence = 0.0;
};

struct Spectrum {
    std::vector<double> amplitude;   // one-sided, bin i at i·freq_resolution_hz
    double freq_resolution_hz = 0.0;
};

/// One-sided amplitude spectrum with a periodic Hann taper, scaled so a pure
/// bin-centered sinusoid of amplitude A shows as A.
Spectrum amplitude_spectrum(const TimeSeries& series);

/// Local maxima with prominence ≥ min_prominence, amplitude-descending.
/// Bins 0 and 1 (DC and its Hann leakage bin) are excluded.
std::vector<SpectrumPeak> find_spectrum_peaks(const Spectrum& spectrum, double min_prominence);

/// amplitude_spectrum + find_spectrum_peaks; needs ≥ 64 gap-free samples.
std::vector<SpectrumPeak> spectrum_peaks(const TimeSeries& series, double min_prominence);

struct StatReport {
    std::string metric;
    double value = 0.0;
    std::int64_t window_start_ms = 0;
    std::int64_t window_end_ms = 0;
    std::string source;
};

std::string stat_report_json(const StatReport& report);

void write_histogram_csv(const Histogram& hist, const std::filesystem::path& file);
void write_acf_csv(std::span<const std::vector<double>> acf_windows, const std::filesystem::path& file);
void write_spectrum_csv(const Spectrum& spectrum, const std::filesystem::path& file);

} // namespace freqdyn

#endif

#include "freqdyn/stats.hpp"

#include "freqdyn/csv.hpp"
#include "freqdyn/fft.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace freqdyn {

namespace {

std::int64_t bin_index(double v, double width) {
    return static_cast<std::int64_t>(std::floor(v / width));
}

std::vector<double> non_gap_values(const TimeSeries& s) {
    std::vector<double> v;
    v.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!s.gap_mask[i]) v.push_back(s.values[i]);
    return v;
}

} // namespace

Histogram build_histogram(std::span<const double> values, double bin_width) {
    if (!(bin_width > 0.0))
        throw std::invalid_argument("histogram: bin width must be positive");
    if (values.empty())
        throw std::invalid_argument("histogram: empty input");
    HistogramAccumulator acc(bin_width);
    acc.add(values);
    return acc.finalize();
}

HistogramAccumulator::HistogramAccumulator(double bin_width) : bin_width_(bin_width) {
    if (!(bin_width > 0.0))
        throw std::invalid_argument("histogram: bin width must be positive");
}

void HistogramAccumulator::ensure_bin(std::int64_t bin) {
    if (!any_) {
        min_bin_ = max_bin_ = bin;
        counts_.assign(1, 0);
        any_ = true;
        return;
    }
    if (bin < min_bin_) {
        counts_.insert(counts_.begin(), static_cast<std::size_t>(min_bin_ - bin), 0);
        min_bin_ = bin;
    } else if (bin > max_bin_) {
        counts_.insert(counts_.end(), static_cast<std::size_t>(bin - max_bin_), 0);
        max_bin_ = bin;
    }
}

void HistogramAccumulator::add(std::span<const double> values) {
    for (double v : values) {
        const std::int64_t bin = bin_index(v, bin_width_);
        ensure_bin(bin);
        ++counts_[static_cast<std::size_t>(bin - min_bin_)];
        ++n_;
        s1_ += v;
        s2_ += v * v;
        s3_ += v * v * v;
    }
}

double HistogramAccumulator::variance() const {
    if (n_ < 2) return 0.0;
    const double m = mean();
    return std::max(0.0, s2_ / static_cast<double>(n_) - m * m);
}

Histogram HistogramAccumulator::finalize() const {
    if (!any_)
        throw std::invalid_argument("histogram: empty input");
    Histogram h;
    h.bin_width = bin_width_;
    h.first_bin = min_bin_;
    h.counts = counts_;
    h.total = n_;
    h.skewness = skewness_from_power_sums(n_, s1_, s2_, s3_);
    return h;
}

double skewness_from_power_sums(std::size_t n, double s1, double s2, double s3) {
    if (n < 3) return 0.0;
    const double dn = static_cast<double>(n);
    const double mean = s1 / dn;
    const double m2 = s2 / dn - mean * mean;
    const double m3 = s3 / dn - 3.0 * mean * s2 / dn + 2.0 * mean * mean * mean;
    if (!(m2 > 0.0)) return 0.0;
    const double g1 = m3 / std::pow(m2, 1.5);
    return g1 * std::sqrt(dn * (dn - 1.0)) / (dn - 2.0);
}

double sample_skewness(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 3) return 0.0;
    // Centered accumulation: exact zeros for exactly symmetric samples.
    double s1 = 0.0;
    for (double v : values) s1 += v;
    const double mean = s1 / static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    if (!(m2 > 0.0)) return 0.0;
    const double dn = static_cast<double>(n);
    return (m3 / std::pow(m2, 1.5)) * std::sqrt(dn * (dn - 1.0)) / (dn - 2.0);
}

double std_dev(std::span<const double> values) {
    if (values.size() < 2)
        throw std::invalid_argument("std_dev: need at least 2 samples");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double acc = 0.0;
    for (double v : values) {
        const double d = v - mean;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(values.size()));
}

double std_dev(const TimeSeries& series) {
    return std_dev(std::span<const double>(non_gap_values(series)));
}

NormalizeResult normalize_across_groups(std::span<const double> values) {
    NormalizeResult out;
    if (values.empty())
        throw std::invalid_argument("normalize: empty input");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (lo == hi) {
        out.values.assign(values.size(), 0.0);
        out.degenerate = true;
        return out;
    }
    out.values.reserve(values.size());
    for (double v : values) out.values.push_back((v - lo) / (hi - lo));
    return out;
}

Histogram histogram(const TimeSeries& series, double bin_width) {
    const auto vals = non_gap_values(series);
    Histogram h = build_histogram(vals, bin_width);
    h.skewness = sample_skewness(vals);   // centered form
    return h;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("pearson: length mismatch");
    const std::size_t n = x.size();
    if (n < 2)
        throw std::invalid_argument("pearson: need at least 2 observations");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("pearson: correlation undefined for a constant input");
    return sxy / std::sqrt(sxx * syy);
}

DriverCorrelation correlate_fluctuation_drivers(std::span<const double> sigma_f,
                                                std::span<const double> inertia,
                                                std::span<const double> penetration) {
    if (sigma_f.size() != inertia.size() || sigma_f.size() != penetration.size())
        throw std::invalid_argument("correlate: hourly sequences must be aligned");
    if (sigma_f.size() < 3)
        throw std::invalid_argument("correlate: need at least 3 aligned hours");
    DriverCorrelation out;
    out.n_hours = sigma_f.size();
    out.r_inertia = pearson(sigma_f, inertia);
    out.r_ibr = pearson(sigma_f, penetration);
    return out;
}

std::vector<double> acf(const TimeSeries& series, std::size_t max_lag) {
    const auto x = non_gap_values(series);
    if (x.size() <= max_lag + 1)
        throw std::invalid_argument("acf: series shorter than max_lag + 2");
    if (std_dev(std::span<const double>(x)) == 0.0)
        throw std::invalid_argument("acf: constant series");
    std::vector<double> r;
    r.reserve(max_lag + 1);
    r.push_back(1.0);
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        const std::size_t m = x.size() - lag;
        const std::span<const double> head(x.data(), m);
        const std::span<const double> tail(x.data() + lag, m);
        try {
            r.push_back(pearson(head, tail));
        } catch (const std::invalid_argument&) {
            r.push_back(0.0);   // degenerate overlap window
        }
    }
    return r;
}

std::vector<double> windowed_std(const TimeSeries& series, std::size_t window_samples) {
    if (window_samples < 2)
        throw std::invalid_argument("windowed_std: window must hold at least 2 samples");
    std::vector<double> out;
    const std::size_t n_windows = series.size() / window_samples;
    for (std::size_t w = 0; w < n_windows; ++w) {
        const std::span<const double> win(series.values.data() + w * window_samples, window_samples);
        out.push_back(std_dev(win));
    }
    return out;
}

Spectrum amplitude_spectrum(const TimeSeries& series) {
    if (series.has_gaps())
        throw std::runtime_error("spectrum: series has gaps");
    const std::size_t n = series.size();
    if (n < 64)
        throw std::invalid_argument("spectrum: need at least 64 samples");
    // Periodic Hann: a constant input lands exactly in bins 0 and ±1.
    std::vector<double> windowed(n);
    double wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                               static_cast<double>(n)));
        windowed[i] = series.values[i] * w;
        wsum += w;
    }
    const auto spec = fft::rfft(windowed);
    Spectrum out;
    out.freq_resolution_hz = series.rate.hz() / static_cast<double>(n);
    out.amplitude.resize(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i)
        out.amplitude[i] = 2.0 * std::abs(spec[i]) / wsum;
    return out;
}

std::vector<SpectrumPeak> find_spectrum_peaks(const Spectrum& spectrum, double min_prominence) {
    const auto& a = spectrum.amplitude;
    std::vector<SpectrumPeak> peaks;
    if (a.size() < 4) return peaks;
    const std::size_t lo = 2;   // skip DC and its taper-leakage bin
    const std::size_t hi = a.size() - 1;
    for (std::size_t i = lo; i < hi; ++i) {
        if (!(a[i] > a[i - 1] && a[i] >= a[i + 1])) continue;
        // Prominence: height above the higher of the two base valleys, where
        // each base is the minimum before the nearest higher bin (or edge).
        double left_base = a[i];
        for (std::size_t j = i; j-- > lo;) {
            if (a[j] > a[i]) break;
            left_base = std::min(left_base, a[j]);
        }
        double right_base = a[i];
        for (std::size_t j = i + 1; j <= hi; ++j) {
            if (a[j] > a[i]) break;
            right_base = std::min(right_base, a[j]);
        }
        const double prominence = a[i] - std::max(left_base, right_base);
        if (prominence >= min_prominence)
            peaks.push_back({static_cast<double>(i) * spectrum.freq_resolution_hz, a[i], prominence});
    }
    std::stable_sort(peaks.begin(), peaks.end(),
                     [](const SpectrumPeak& p, const SpectrumPeak& q) { return p.amplitude > q.amplitude; });
    return peaks;
}

std::vector<SpectrumPeak> spectrum_peaks(const TimeSeries& series, double min_prominence) {
    return find_spectrum_peaks(amplitude_spectrum(series), min_prominence);
}

std::string stat_report_json(const StatReport& report) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["metric"] = report.metric;
    j["value"] = report.value;
    j["window_start_ms"] = report.window_start_ms;
    j["window_end_ms"] = report.window_end_ms;
    j["source"] = report.source;
    return j.dump(2);
}

void write_histogram_csv(const Histogram& hist, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << "bin_low,bin_high,count\n";
    for (std::size_t i = 0; i < hist.counts.size(); ++i)
        out << csv::format_double(hist.bin_low(i)) << ',' << csv::format_double(hist.bin_high(i))
            << ',' << hist.counts[i] << '\n';
}

void write_acf_csv(std::span<const std::vector<double>> acf_windows, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << "lag";
    for (std::size_t w = 0; w < acf_windows.size(); ++w) out << ",window_" << w;
    out << '\n';
    std::size_t max_len = 0;
    for (const auto& w : acf_windows) max_len = std::max(max_len, w.size());
    for (std::size_t lag = 0; lag < max_len; ++lag) {
        out << lag;
        for (const auto& w : acf_windows) {
            out << ',';
            if (lag < w.size()) out << csv::format_double(w[lag]);
        }
        out << '\n';
    }
}

void write_spectrum_csv(const Spectrum& spectrum, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << "freq_hz,amplitude\n";
    for (std::size_t i = 0; i < spectrum.amplitude.size(); ++i)
        out << csv::format_double(static_cast<double>(i) * spectrum.freq_resolution_hz) << ','
            << csv::format_double(spectrum.amplitude[i]) << '\n';
}

} // namespace freqdyn

#include "freqdyn/timeseries.hpp"

#include "freqdyn/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace freqdyn {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    return -floor_div(-a, b);
}

} // namespace

Rate::Rate(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den < 0) { num = -num; den = -den; }
    if (num <= 0 || den == 0)
        throw std::invalid_argument("sample rate must be positive");
    const std::int64_t g = std::gcd(num, den);
    num /= g;
    den /= g;
}

std::optional<std::int64_t> Rate::integer_factor_to(const Rate& target) const {
    // factor = (num/den) / (target.num/target.den)
    const std::int64_t p = num * target.den;
    const std::int64_t q = den * target.num;
    if (p % q != 0) return std::nullopt;
    const std::int64_t f = p / q;
    if (f < 1) return std::nullopt;
    return f;
}

bool TimeSeries::has_gaps() const {
    return std::any_of(gap_mask.begin(), gap_mask.end(), [](std::uint8_t g) { return g != 0; });
}

double TimeSeries::timestamp_ms(std::size_t i) const {
    return static_cast<double>(start_epoch_ms) +
           static_cast<double>(i) * 1000.0 * static_cast<double>(rate.den) / static_cast<double>(rate.num);
}

TimeSeries make_series(std::int64_t start_epoch_ms, Rate rate, std::vector<double> values,
                       std::vector<std::uint8_t> gap_mask) {
    if (gap_mask.empty())
        gap_mask.assign(values.size(), 0);
    if (gap_mask.size() != values.size())
        throw std::invalid_argument("gap_mask length must equal values length");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!gap_mask[i] && !std::isfinite(values[i]))
            throw std::invalid_argument("non-gap sample " + std::to_string(i) + " is not finite");
    TimeSeries s;
    s.start_epoch_ms = start_epoch_ms;
    s.rate = rate;
    s.values = std::move(values);
    s.gap_mask = std::move(gap_mask);
    return s;
}

ValidationReport validate(const TimeSeries& series, double band_low, double band_high) {
    ValidationReport rep;
    rep.n_samples = series.size();
    rep.band_low = band_low;
    rep.band_high = band_high;
    rep.min_value = std::numeric_limits<double>::quiet_NaN();
    rep.max_value = std::numeric_limits<double>::quiet_NaN();
    std::size_t run = 0;
    bool any = false;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series.gap_mask[i]) {
            ++rep.gap_count;
            ++run;
            rep.longest_gap_run = std::max(rep.longest_gap_run, run);
            continue;
        }
        run = 0;
        const double v = series.values[i];
        if (!any) {
            rep.min_value = rep.max_value = v;
            any = true;
        } else {
            rep.min_value = std::min(rep.min_value, v);
            rep.max_value = std::max(rep.max_value, v);
        }
        if (v < band_low || v > band_high) ++rep.band_violations;
    }
    rep.within_band = rep.band_violations == 0;
    return rep;
}

GapFillResult fill_gaps(const TimeSeries& series, std::size_t max_gap_samples) {
    GapFillResult out;
    out.series = series;
    const std::size_t n = series.size();
    std::size_t i = 0;
    while (i < n) {
        if (!series.gap_mask[i]) { ++i; continue; }
        std::size_t j = i;
        while (j < n && series.gap_mask[j]) ++j;
        const std::size_t run = j - i;
        const bool interior = i > 0 && j < n;
        if (interior && run <= max_gap_samples) {
            const double left = series.values[i - 1];
            const double right = series.values[j];
            const double step = (right - left) / static_cast<double>(run + 1);
            for (std::size_t k = 0; k < run; ++k) {
                out.series.values[i + k] = left + step * static_cast<double>(k + 1);
                out.series.gap_mask[i + k] = 0;
            }
            out.filled_samples += run;
        } else {
            out.unfilled_gap_samples += run;
            if (!interior) out.boundary_gaps_remain = true;
        }
        i = j;
    }
    return out;
}

namespace {

/// Symmetric Hamming-windowed sinc low-pass, unit DC gain.
std::vector<double> lowpass_kernel(double cutoff_norm, std::size_t half_width) {
    const std::size_t len = 2 * half_width + 1;
    std::vector<double> h(len);
    for (std::size_t i = 0; i < len; ++i) {
        const double m = static_cast<double>(i) - static_cast<double>(half_width);
        const double x = 2.0 * cutoff_norm * m;
        double sinc = 1.0;
        if (m != 0.0)
            sinc = std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        const double w = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                                 static_cast<double>(len - 1));
        h[i] = 2.0 * cutoff_norm * sinc * w;
    }
    const double sum = std::accumulate(h.begin(), h.end(), 0.0);
    for (double& v : h) v /= sum;
    return h;
}

/// Zero-phase FIR via symmetric kernel; edges handled by reflection.
std::vector<double> filter_reflect(const std::vector<double>& x, const std::vector<double>& h) {
    const std::size_t n = x.size();
    const std::int64_t hw = static_cast<std::int64_t>(h.size() / 2);
    std::vector<double> y(n, 0.0);
    auto sample = [&](std::int64_t idx) {
        if (idx < 0) idx = -idx;
        const std::int64_t last = static_cast<std::int64_t>(n) - 1;
        if (idx > last) idx = 2 * last - idx;
        return x[static_cast<std::size_t>(std::clamp<std::int64_t>(idx, 0, last))];
    };
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k)
            acc += h[k] * sample(static_cast<std::int64_t>(i) + static_cast<std::int64_t>(k) - hw);
        y[i] = acc;
    }
    return y;
}

} // namespace

TimeSeries decimate(const TimeSeries& series, const SamplingSpec& spec) {
    if (series.has_gaps())
        throw std::runtime_error("decimate requires a gap-free series; fill_gaps first");
    const auto factor = series.rate.integer_factor_to(spec.target_rate);
    if (!factor)
        throw std::invalid_argument("target rate " + std::to_string(spec.target_rate.hz()) +
                                    " Hz does not divide input rate " + std::to_string(series.rate.hz()) +
                                    " Hz by an integer factor");
    const std::size_t k = static_cast<std::size_t>(*factor);
    std::vector<double> src = series.values;
    if (spec.antialias && k > 1 && src.size() > 1) {
        // Cutoff at 80% of target Nyquist; transition band reaches the target
        // Nyquist, sized for ~50 dB stopband with a Hamming window.
        const double cutoff_norm = 0.4 / static_cast<double>(k);
        const std::size_t half_width = std::max<std::size_t>(10, 20 * k);
        src = filter_reflect(src, lowpass_kernel(cutoff_norm, half_width));
    }
    std::vector<double> out;
    out.reserve(src.size() / k + 1);
    for (std::size_t i = 0; i < src.size(); i += k)
        out.push_back(src[i]);
    return make_series(series.start_epoch_ms, spec.target_rate, std::move(out));
}

TimeSeries slice_window(const TimeSeries& series, std::int64_t start_ms, std::int64_t end_ms) {
    if (start_ms >= end_ms)
        throw std::invalid_argument("slice_window: start must precede end");
    const std::int64_t num = series.rate.num;
    const std::int64_t den = series.rate.den;
    // Sample i sits at start_epoch_ms + i*1000*den/num ms. First index with
    // timestamp >= start_ms, last index with timestamp < end_ms.
    const std::int64_t i0 = std::max<std::int64_t>(0, ceil_div((start_ms - series.start_epoch_ms) * num, 1000 * den));
    const std::int64_t i1 = std::min<std::int64_t>(
        static_cast<std::int64_t>(series.size()),
        ceil_div((end_ms - series.start_epoch_ms) * num, 1000 * den));
    if (i0 >= i1)
        throw std::runtime_error("slice_window: window does not overlap the series span");
    const std::int64_t offset_num = i0 * 1000 * den;
    if (offset_num % num != 0)
        throw std::invalid_argument("slice_window: first retained sample is not on an integer millisecond; "
                                    "align the window to the sample grid");
    TimeSeries out;
    out.start_epoch_ms = series.start_epoch_ms + offset_num / num;
    out.rate = series.rate;
    out.values.assign(series.values.begin() + i0, series.values.begin() + i1);
    out.gap_mask.assign(series.gap_mask.begin() + i0, series.gap_mask.begin() + i1);
    return out;
}

TimeSeries load_pmu_csv(const std::filesystem::path& file, Rate declared_rate) {
    struct Row { std::int64_t ts; double value; bool gap; std::size_t line; };
    std::vector<Row> rows;
    csv::for_each_row(file, "timestamp_ms,frequency_hz", [&](std::size_t line, const auto& fields) {
        if (fields.size() != 2)
            throw csv::RowError(file, line, "expected 2 fields, got " + std::to_string(fields.size()));
        Row r{};
        r.line = line;
        r.ts = csv::parse_int(fields[0], file, line);
        std::string v(fields[1]);
        if (v.empty() || v == "NaN" || v == "nan" || v == "NAN") {
            r.value = std::numeric_limits<double>::quiet_NaN();
            r.gap = true;
        } else {
            r.value = csv::parse_double(fields[1], file, line);
            r.gap = false;
            if (!std::isfinite(r.value))
                throw csv::RowError(file, line, "non-finite frequency value");
        }
        rows.push_back(r);
    });
    if (rows.empty())
        throw std::runtime_error(file.string() + ": no data rows");

    const std::int64_t s0 = rows.front().ts;
    const std::int64_t num = declared_rate.num;
    const std::int64_t den = declared_rate.den;
    std::vector<double> values;
    std::vector<std::uint8_t> mask;
    std::int64_t prev_index = -1;
    for (const Row& r : rows) {
        // Nearest index on the exact rational grid, then verify the row's
        // integer timestamp against that grid (0.5 ms quantization + 0.1 ms).
        const double fidx = static_cast<double>(r.ts - s0) * static_cast<double>(num) /
                            (1000.0 * static_cast<double>(den));
        const std::int64_t index = std::llround(fidx);
        const double ideal_ms = static_cast<double>(s0) +
                                static_cast<double>(index) * 1000.0 * static_cast<double>(den) /
                                    static_cast<double>(num);
        if (index < 0 || std::abs(static_cast<double>(r.ts) - ideal_ms) > 0.6)
            throw csv::RowError(file, r.line,
                                "timestamp " + std::to_string(r.ts) + " off the " +
                                    std::to_string(declared_rate.hz()) + " Hz grid");
        if (index <= prev_index)
            throw csv::RowError(file, r.line, "timestamp does not advance");
        for (std::int64_t g = prev_index + 1; g < index; ++g) {
            values.push_back(std::numeric_limits<double>::quiet_NaN());
            mask.push_back(1);
        }
        values.push_back(r.gap ? std::numeric_limits<double>::quiet_NaN() : r.value);
        mask.push_back(r.gap ? 1 : 0);
        prev_index = index;
    }
    return make_series(s0, declared_rate, std::move(values), std::move(mask));
}

void save_pmu_csv(const TimeSeries& series, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out)
        throw std::runtime_error("cannot write " + file.string());
    out << "timestamp_ms,frequency_hz\n";
    const std::int64_t num = series.rate.num;
    const std::int64_t den = series.rate.den;
    std::string buf;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double exact = static_cast<double>(series.start_epoch_ms) +
                             static_cast<double>(i) * 1000.0 * static_cast<double>(den) /
                                 static_cast<double>(num);
        buf.append(std::to_string(std::llround(exact)));
        buf.push_back(',');
        if (series.gap_mask[i])
            buf.append("NaN");
        else
            buf.append(csv::format_double(series.values[i]));
        buf.push_back('\n');
        if (buf.size() > (1u << 20)) {
            out << buf;
            buf.clear();
        }
    }
    out << buf;
}

} // namespace freqdyn

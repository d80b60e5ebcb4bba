#ifndef FREQDYN_TIMESERIES_HPP
#define FREQDYN_TIMESERIES_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace freqdyn {

/// Exact rational sample rate in Hz. PMU streams are 60, 30 or 1 Hz, but the
/// type keeps num/den so integer-ratio conversions stay exact.
struct Rate {
    std::int64_t num = 1;
    std::int64_t den = 1;

    Rate() = default;
    Rate(std::int64_t n, std::int64_t d = 1);

    double hz() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rate&) const = default;

    /// Integer decimation factor this/target, or nullopt if not an integer ≥ 1.
    std::optional<std::int64_t> integer_factor_to(const Rate& target) const;
};

/// Uniformly sampled scalar signal. Sample i lives at exactly
/// start_epoch_ms + i/rate seconds; gap_mask[i] != 0 marks a missing sample.
/// Instances are treated as immutable: every operation returns a new series.
struct TimeSeries {
    std::int64_t start_epoch_ms = 0;
    Rate rate;
    std::vector<double> values;
    std::vector<std::uint8_t> gap_mask;

    std::size_t size() const { return values.size(); }
    bool has_gaps() const;
    double timestamp_ms(std::size_t i) const;
};

/// Validating constructor: checks mask length, rate positivity and finiteness
/// of non-gap samples. An empty mask means "no gaps".
TimeSeries make_series(std::int64_t start_epoch_ms, Rate rate, std::vector<double> values,
                       std::vector<std::uint8_t> gap_mask = {});

struct ValidationReport {
    std::size_t n_samples = 0;
    std::size_t gap_count = 0;
    std::size_t longest_gap_run = 0;
    double min_value = 0.0;   // over non-gap samples; NaN when none
    double max_value = 0.0;
    double band_low = 55.0;
    double band_high = 65.0;
    std::size_t band_violations = 0;
    bool within_band = true;
};

/// Report-only inspection; never throws. Band defaults suit frequency channels.
ValidationReport validate(const TimeSeries& series, double band_low = 55.0, double band_high = 65.0);

struct GapFillResult {
    TimeSeries series;
    std::size_t filled_samples = 0;
    std::size_t unfilled_gap_samples = 0;
    bool boundary_gaps_remain = false;   // leading/trailing runs cannot be interpolated
};

/// Linearly interpolates interior gap runs of length ≤ max_gap_samples from the
/// bounding non-gap samples. Longer runs and boundary runs stay masked.
/// Non-gap samples are preserved bit-for-bit.
GapFillResult fill_gaps(const TimeSeries& series, std::size_t max_gap_samples = 30);

struct SamplingSpec {
    Rate target_rate;
    bool antialias = true;
};

/// Integer-factor downsampling. With antialias, a zero-phase FIR low-pass with
/// cutoff at 80% of the target Nyquist is applied before stride sampling.
/// Requires a gap-free series and an integer decimation factor.
TimeSeries decimate(const TimeSeries& series, const SamplingSpec& spec);

/// Samples with timestamp in [start_ms, end_ms). Throws on empty overlap, and
/// on windows whose first retained sample does not fall on an integer
/// millisecond (hour-aligned windows at integer rates are always exact).
TimeSeries slice_window(const TimeSeries& series, std::int64_t start_ms, std::int64_t end_ms);

/// PMU CSV ("timestamp_ms,frequency_hz"). Empty or NaN value fields and absent
/// rows become gap samples; timestamps are checked against the declared rate's
/// exact grid (±0.6 ms: integer-ms quantization plus drift allowance).
TimeSeries load_pmu_csv(const std::filesystem::path& file, Rate declared_rate);
void save_pmu_csv(const TimeSeries& series, const std::filesystem::path& file);

} // namespace freqdyn

#endif

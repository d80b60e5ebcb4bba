#ifndef FREQDYN_PIPELINE_HPP
#define FREQDYN_PIPELINE_HPP

#include "freqdyn/gridmetrics.hpp"
#include "freqdyn/stats.hpp"
#include "freqdyn/vmd.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace freqdyn {

/// Measurement sites, each mapped to the geo-electric region that hosts it.
/// CW and SE are distinct sites reporting against the combined SE_CW tables.
enum class Site { NE, N, CW, SE, S };
inline constexpr std::array<Site, 5> kAllSites{Site::NE, Site::N, Site::CW, Site::SE, Site::S};

std::string site_name(Site s);
Site parse_site(const std::string& token);
Region site_region(Site s);

struct CriticalWeek {
    Date start_date;
    Date end_date;   // start + 6 days
    Region region = Region::NE;
    double mean_penetration_pct = 0.0;
};

/// Evaluates every day-aligned 7-day window with complete hourly coverage for
/// the region and returns the one maximizing mean penetration (earliest wins
/// ties). Throws when no window has 7 consecutive complete days.
CriticalWeek select_critical_week(std::span<const RegionalHourRecord> records, Region region);

struct HourRange {
    int begin_hour = 0;
    int end_hour = 0;   // half-open [begin, end)
};

enum class GroupLabel { GroupI, GroupII };

struct WindowDecomposition {
    Date day;
    DecompositionSplit split;
};

struct GroupDataset {
    GroupLabel label = GroupLabel::GroupI;
    HourRange hours;
    std::map<Site, std::vector<WindowDecomposition>> windows;
};

/// Slices each day of the critical week into the two group windows, splits
/// each window into QSS/dynamic and collects the results per site. A window
/// with unfillable gaps is skipped (and reported via the skipped list).
struct FormGroupsResult {
    GroupDataset group1;
    GroupDataset group2;
    std::vector<std::string> skipped;
};
FormGroupsResult form_groups(const std::map<Site, TimeSeries>& pmu_week, const CriticalWeek& week,
                             const VmdConfig& vmd, HourRange group1_hours = {9, 12},
                             HourRange group2_hours = {21, 24}, std::size_t max_gap_samples = 30);

enum class Stage { Ingest, Vmd, Stats };
std::string stage_name(Stage s);

class StageError : public std::runtime_error {
public:
    StageError(Stage stage, const std::string& what)
        : std::runtime_error(stage_name(stage) + ": " + what), stage_(stage) {}
    Stage stage() const { return stage_; }

private:
    Stage stage_;
};

struct FrameworkConfig {
    VmdConfig vmd;
    HourRange group1{9, 12};
    HourRange group2{21, 24};
    double hist_bin_width_hz = 0.001;
    std::size_t acf_max_lag = 150;
    double spectrum_min_prominence = 0.005;
    double osc_min_freq_hz = 1.0;
    Region focus_region = Region::NE;
    std::size_t max_gap_samples = 30;
};

struct FrameworkInputs {
    std::vector<RegionalHourRecord> records;   // balance, inertia merged when available
    bool has_inertia = false;
    std::map<Site, TimeSeries> pmu;
};

struct SiteGroupReport {
    Histogram hist;
    double sigma_f = 0.0;                          // std of all group dynamic samples
    std::vector<std::vector<double>> acf_windows;  // one ACF per contiguous window
};

struct SiteCorrelationReport {
    double r_inertia = 0.0;
    double r_ibr = 0.0;
    std::size_t n_hours = 0;
};

struct SiteSpectrumReport {
    std::vector<SpectrumPeak> peaks;
    double freq_resolution_hz = 0.0;
    bool oscillation_detected = false;
    Spectrum mean_spectrum;   // amplitude spectrum averaged over windows
};

struct StageLog {
    std::string stage;
    std::string summary;
};

struct FrameworkReport {
    CriticalWeek critical_week;
    HourRange group1_hours, group2_hours;
    std::map<Site, SiteGroupReport> group1, group2;
    std::optional<std::map<Site, SiteCorrelationReport>> correlations;
    std::map<Site, SiteSpectrumReport> spectra;
    std::vector<StageLog> stages;
    std::vector<std::string> warnings;
};

/// Runs the four-stage evaluation: (i) hourly penetration, (ii) critical-week
/// selection, (iii) per-window QSS/dynamic extraction over every 3-hour
/// window of the week, (iv) histograms/skewness, driver correlations, ACF and
/// spectrum-peak detection. Stage failures surface as StageError.
FrameworkReport evaluate_framework(const FrameworkInputs& inputs, const FrameworkConfig& config);

/// report.json plus histograms/, acf/ and spectra/ CSVs under out_dir.
void write_report(const FrameworkReport& report, const std::filesystem::path& out_dir);
std::string report_json(const FrameworkReport& report);

} // namespace freqdyn

#endif

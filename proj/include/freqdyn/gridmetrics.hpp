#ifndef FREQDYN_GRIDMETRICS_HPP
#define FREQDYN_GRIDMETRICS_HPP

#include "freqdyn/calendar.hpp"
#include "freqdyn/stats.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace freqdyn {

/// Geo-electric regions of the interconnection.
enum class Region { N, NE, S, SE_CW };
inline constexpr std::array<Region, 4> kAllRegions{Region::N, Region::NE, Region::S, Region::SE_CW};

std::string region_name(Region r);
Region parse_region(const std::string& token);

enum class CurtailReason { EnergyBalance, Reliability, ExternalUnavailability };
inline constexpr std::array<CurtailReason, 3> kAllReasons{
    CurtailReason::EnergyBalance, CurtailReason::Reliability, CurtailReason::ExternalUnavailability};

std::string reason_name(CurtailReason r);        // CSV token, e.g. "energy_balance"
CurtailReason parse_reason(const std::string& token);

/// One region-hour of the balance tables; curtailment event rows reuse the
/// same shape with only the curtail fields populated.
struct RegionalHourRecord {
    Region region = Region::N;
    Date date;
    int hour = 0;                         // 0..23
    double hydro_mw = 0.0;
    double thermal_mw = 0.0;
    double wind_mw = 0.0;
    double solar_mw = 0.0;
    double der_mw = 0.0;
    double demand_mw = 0.0;
    std::optional<double> inertia_mws;
    std::optional<double> curtailed_wind_mw;
    std::optional<CurtailReason> curtail_reason;
};

struct MachineState {
    double inertia_mws = 0.0;   // > 0
    double freq_hz = 0.0;
};

/// Inertia-weighted average frequency: Σ H_k ω_k / Σ H_k.
double coi_frequency(std::span<const MachineState> machines);

/// (wind + solar + der) / demand × 100. Demand must be positive.
double ibr_penetration(const RegionalHourRecord& record);

/// demand − wind − solar − der; negative means surplus.
double net_load(const RegionalHourRecord& record);

/// R_i = NL_{i+h} − NL_i over a contiguous hourly sequence.
std::vector<double> net_load_ramps(std::span<const double> net_loads, std::size_t horizon_h);

/// Half-open bins of width bin_width_mw anchored at multiples of the width.
Histogram ramp_histogram(std::span<const double> ramps, double bin_width_mw);

struct CurtailmentBreakdown {
    struct ReasonStats {
        CurtailReason reason;
        std::size_t count = 0;      // event rows
        double total_mw = 0.0;
        double percentage = 0.0;    // of rows in range
    };
    std::vector<ReasonStats> reasons;   // fixed reason order
    std::size_t total_rows = 0;
};

/// Groups curtailment rows whose hour falls in [h0, h1) by reason.
CurtailmentBreakdown curtailment_breakdown(std::span<const RegionalHourRecord> records, int h0, int h1);

/// Sums curtailed MW into 24 hour-of-day slots.
std::array<double, 24> hourly_curtailment_profile(std::span<const RegionalHourRecord> records);

/// Sums the four regional records per hour; hours missing any region are
/// dropped. Output is ordered by (date, hour); region field is meaningless.
std::vector<RegionalHourRecord> aggregate_system(std::span<const RegionalHourRecord> records);

// CSV exchange. Loaders preserve file row order; rows are strictly validated
// with 1-based row numbers in error messages. When row_numbers is given it
// receives each record's source line for later diagnostics.
// balance: date,hour,region,hydro_mw,thermal_mw,wind_mw,solar_mw,der_mw,demand_mw
// inertia: date,hour,region,inertia_mws
// curtailment: date,hour,region,curtailed_wind_mw,reason
std::vector<RegionalHourRecord> load_balance_csv(const std::filesystem::path& file,
                                                 std::vector<std::size_t>* row_numbers = nullptr);
std::vector<RegionalHourRecord> load_curtailment_csv(const std::filesystem::path& file);

struct InertiaRow {
    Date date;
    int hour;
    Region region;
    double inertia_mws;
};
std::vector<InertiaRow> load_inertia_csv(const std::filesystem::path& file);
void merge_inertia(std::vector<RegionalHourRecord>& records, std::span<const InertiaRow> rows);

void save_balance_csv(std::span<const RegionalHourRecord> records, const std::filesystem::path& file);
void save_inertia_csv(std::span<const RegionalHourRecord> records, const std::filesystem::path& file);
void save_curtailment_csv(std::span<const RegionalHourRecord> records, const std::filesystem::path& file);

} // namespace freqdyn

#endif

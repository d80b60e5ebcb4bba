#ifndef FREQDYN_SYNTH_HPP
#define FREQDYN_SYNTH_HPP

#include "freqdyn/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

namespace freqdyn {

struct ToneSpec {
    double freq_hz = 0.0;
    double amplitude_hz = 0.0;
};

struct RegionScenario {
    double demand_base_mw = 10000.0;
    double demand_swing = 0.15;            // relative daily swing
    double hydro_base_mw = 6000.0;
    double thermal_base_mw = 1000.0;
    double wind_base_mw = 500.0;
    double wind_peak_mw = 0.0;             // weekly bump on top of the base
    double solar_peak_mw = 500.0;          // midday bell peak
    double der_peak_mw = 200.0;
    double inertia_base_mws = 60000.0;
    double inertia_pen_slope = 100.0;      // MW·s shed per penetration point
    double inertia_floor_mws = 5000.0;
    double noise_floor_hz = 0.004;         // ambient fluctuation sigma
    double noise_pen_coupling_hz = 0.0;    // extra sigma per 100% penetration
    double trend_amplitude_hz = 0.02;
    double trend_period_s = 5400.0;
    double curtail_scale_mw = 0.0;         // 0 = no curtailment rows
    std::vector<ToneSpec> tones;
};

/// Deterministic test-data substitute for the proprietary PMU and operator
/// tables. Balance/inertia tables cover `days`; PMU series cover the critical
/// week the balance data implies (focus region NE).
struct SyntheticScenario {
    std::uint64_t seed = 42;
    int days = 28;
    Date start_date{2023, 7, 1};
    Rate pmu_rate{30, 1};
    double peak_day = 14.0;            // center of the wind bump, days from start
    double peak_width_days = 2.5;
    std::map<Region, RegionScenario> regions;

    static SyntheticScenario defaults();
};

struct SyntheticData {
    std::vector<RegionalHourRecord> records;       // balance with inertia attached
    std::vector<RegionalHourRecord> curtailment;   // event rows
    std::map<Site, TimeSeries> pmu;
    CriticalWeek critical_week;
};

SyntheticData generate_synthetic(const SyntheticScenario& scenario);

/// Hourly values the generator used, exposed for tests and calibration.
double scenario_penetration(const SyntheticScenario& scenario, Region region, int day, int hour);

/// Flat key-value scenario file ("schema_version 1" required, unknown keys
/// rejected, region-scoped keys like "NE.wind_peak_mw", repeatable
/// "NE.tone <freq_hz> <amplitude_hz>" lines).
SyntheticScenario load_scenario(const std::filesystem::path& file);

/// Writes balance/inertia/curtailment CSVs, one PMU CSV per site and a
/// ready-to-run framework config into out_dir.
void write_synthetic_dataset(const SyntheticData& data, const SyntheticScenario& scenario,
                             const std::filesystem::path& out_dir);

} // namespace freqdyn

#endif

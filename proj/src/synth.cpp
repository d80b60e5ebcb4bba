#include "freqdyn/synth.hpp"

#include "freqdyn/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace freqdyn {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic normal stream pinned in-repo (no libstdc++ dependence).
class GaussStream {
public:
    explicit GaussStream(std::uint64_t seed) : state_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double uniform() { return static_cast<double>(splitmix64(state_) >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

double solar_shape(int hour) {
    if (hour < 6 || hour >= 18) return 0.0;
    return std::sin(std::numbers::pi * (static_cast<double>(hour) - 6.0) / 12.0);
}

double demand_shape(int hour) {
    // Evening peak around 19h, trough in the small hours.
    return -std::cos(2.0 * std::numbers::pi * (static_cast<double>(hour) - 7.0) / 24.0);
}

double wind_bump(const SyntheticScenario& sc, double day) {
    const double d = (day - sc.peak_day) / sc.peak_width_days;
    return std::exp(-0.5 * d * d);
}

RegionalHourRecord make_record(const SyntheticScenario& sc, Region region, int day, int hour) {
    const RegionScenario& r = sc.regions.at(region);
    RegionalHourRecord rec;
    rec.region = region;
    rec.date = add_days(sc.start_date, day);
    rec.hour = hour;
    rec.demand_mw = r.demand_base_mw * (1.0 + r.demand_swing * demand_shape(hour));
    rec.wind_mw = r.wind_base_mw + r.wind_peak_mw * wind_bump(sc, static_cast<double>(day) + hour / 24.0);
    rec.solar_mw = r.solar_peak_mw * solar_shape(hour);
    rec.der_mw = r.der_peak_mw * solar_shape(hour);
    rec.hydro_mw = r.hydro_base_mw;
    rec.thermal_mw = r.thermal_base_mw;
    const double pen = (rec.wind_mw + rec.solar_mw + rec.der_mw) / rec.demand_mw * 100.0;
    rec.inertia_mws = std::max(r.inertia_floor_mws, r.inertia_base_mws - r.inertia_pen_slope * pen);
    return rec;
}

} // namespace

double scenario_penetration(const SyntheticScenario& scenario, Region region, int day, int hour) {
    return ibr_penetration(make_record(scenario, region, day, hour));
}

SyntheticScenario SyntheticScenario::defaults() {
    SyntheticScenario sc;
    RegionScenario ne;
    ne.demand_base_mw = 12000.0;
    ne.hydro_base_mw = 4000.0;
    ne.thermal_base_mw = 500.0;
    ne.wind_base_mw = 9500.0;
    ne.wind_peak_mw = 7500.0;
    ne.solar_peak_mw = 2600.0;
    ne.der_peak_mw = 1300.0;
    ne.inertia_base_mws = 45000.0;
    ne.inertia_pen_slope = 120.0;
    ne.inertia_floor_mws = 8000.0;
    ne.noise_floor_hz = 0.004;
    ne.noise_pen_coupling_hz = 0.012;
    ne.curtail_scale_mw = 900.0;
    ne.tones.push_back({0.9, 0.004});   // ambient inter-area mode
    ne.tones.push_back({2.5, 0.02});    // converter-driven oscillation
    sc.regions[Region::NE] = ne;

    RegionScenario n;
    n.demand_base_mw = 7100.0;
    n.hydro_base_mw = 7900.0;
    n.thermal_base_mw = 1400.0;
    n.wind_base_mw = 210.0;
    n.solar_peak_mw = 300.0;
    n.der_peak_mw = 120.0;
    n.inertia_base_mws = 58000.0;
    n.tones.push_back({0.55, 0.004});
    sc.regions[Region::N] = n;

    RegionScenario s;
    s.demand_base_mw = 12500.0;
    s.hydro_base_mw = 9200.0;
    s.thermal_base_mw = 1000.0;
    s.wind_base_mw = 700.0;
    s.wind_peak_mw = 500.0;
    s.solar_peak_mw = 800.0;
    s.der_peak_mw = 400.0;
    s.inertia_base_mws = 60000.0;
    s.tones.push_back({0.75, 0.004});
    sc.regions[Region::S] = s;

    RegionScenario se;
    se.demand_base_mw = 41800.0;
    se.hydro_base_mw = 29000.0;
    se.thermal_base_mw = 5200.0;
    se.wind_base_mw = 10.0;
    se.solar_peak_mw = 3400.0;
    se.der_peak_mw = 1700.0;
    se.inertia_base_mws = 178000.0;
    se.tones.push_back({0.65, 0.004});
    sc.regions[Region::SE_CW] = se;
    return sc;
}

SyntheticData generate_synthetic(const SyntheticScenario& scenario) {
    if (scenario.days < 7)
        throw std::invalid_argument("scenario: need at least 7 days");
    const double nyquist = scenario.pmu_rate.hz() / 2.0;
    for (const auto& [region, rs] : scenario.regions)
        for (const auto& tone : rs.tones)
            if (tone.freq_hz >= nyquist)
                throw std::invalid_argument("scenario: tone " + csv::format_double(tone.freq_hz) +
                                            " Hz at/above PMU Nyquist");
    for (Region r : kAllRegions)
        if (!scenario.regions.count(r))
            throw std::invalid_argument("scenario: missing region " + region_name(r));

    SyntheticData data;
    for (int day = 0; day < scenario.days; ++day)
        for (int hour = 0; hour < 24; ++hour)
            for (Region region : kAllRegions)
                data.records.push_back(make_record(scenario, region, day, hour));

    // Curtailment events: morning-heavy mass while the wind bump is on, with a
    // deterministic reason mix dominated by balance constraints.
    std::uint64_t curtail_state = scenario.seed ^ 0xc0ffee;
    for (int day = 0; day < scenario.days; ++day) {
        for (int hour = 0; hour < 24; ++hour) {
            for (Region region : kAllRegions) {
                const RegionScenario& rs = scenario.regions.at(region);
                if (rs.curtail_scale_mw <= 0.0) continue;
                const double w = std::exp(-0.5 * std::pow((static_cast<double>(hour) - 9.5) / 2.0, 2.0));
                const double mw = rs.curtail_scale_mw * w * wind_bump(scenario, day);
                if (mw < 1.0) continue;
                RegionalHourRecord ev;
                ev.region = region;
                ev.date = add_days(scenario.start_date, day);
                ev.hour = hour;
                ev.curtailed_wind_mw = mw;
                const double u = static_cast<double>(splitmix64(curtail_state) >> 11) * 0x1.0p-53;
                ev.curtail_reason = u < 0.52   ? CurtailReason::EnergyBalance
                                    : u < 0.78 ? CurtailReason::Reliability
                                               : CurtailReason::ExternalUnavailability;
                data.curtailment.push_back(ev);
            }
        }
    }

    data.critical_week = select_critical_week(data.records, Region::NE);
    const int week_day0 = static_cast<int>(days_from_civil(data.critical_week.start_date) -
                                           days_from_civil(scenario.start_date));

    const std::int64_t start_ms = epoch_ms(data.critical_week.start_date);
    const std::int64_t n_samples = 7LL * 86400 * scenario.pmu_rate.num / scenario.pmu_rate.den;
    const double dt = 1.0 / scenario.pmu_rate.hz();

    for (Site site : kAllSites) {
        const Region region = site_region(site);
        const RegionScenario& rs = scenario.regions.at(region);
        GaussStream noise(scenario.seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(site) + 1);
        const double site_phase = 0.7 * static_cast<double>(site);

        std::vector<double> values(static_cast<std::size_t>(n_samples));
        const std::int64_t per_hour = 3600 * scenario.pmu_rate.num / scenario.pmu_rate.den;
        double sigma = rs.noise_floor_hz;
        for (std::int64_t i = 0; i < n_samples; ++i) {
            if (i % per_hour == 0) {
                const std::int64_t hour_index = i / per_hour;
                const int day = week_day0 + static_cast<int>(hour_index / 24);
                const int hour = static_cast<int>(hour_index % 24);
                const double pen = scenario_penetration(scenario, region, day, hour);
                sigma = rs.noise_floor_hz + rs.noise_pen_coupling_hz * pen / 100.0;
            }
            const double t = static_cast<double>(i) * dt;
            double v = 60.0;
            if (rs.trend_amplitude_hz != 0.0)
                v += rs.trend_amplitude_hz *
                     std::sin(2.0 * std::numbers::pi * t / rs.trend_period_s + site_phase);
            for (const auto& tone : rs.tones)
                v += tone.amplitude_hz * std::sin(2.0 * std::numbers::pi * tone.freq_hz * t);
            if (sigma > 0.0) v += sigma * noise.next();
            values[static_cast<std::size_t>(i)] = v;
        }
        data.pmu.emplace(site, make_series(start_ms, scenario.pmu_rate, std::move(values)));
    }
    return data;
}

namespace {

RegionScenario& region_of(SyntheticScenario& sc, const std::string& token) {
    return sc.regions.at(parse_region(token));
}

} // namespace

SyntheticScenario load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw std::runtime_error("cannot open scenario " + file.string());
    SyntheticScenario sc = SyntheticScenario::defaults();
    bool versioned = false;
    std::map<Region, bool> tones_cleared;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string key;
        if (!(ss >> key)) continue;
        auto fail = [&](const std::string& why) -> std::invalid_argument {
            return std::invalid_argument(file.string() + ":" + std::to_string(lineno) + ": " + why);
        };
        auto next_num = [&]() {
            double v = 0.0;
            if (!(ss >> v)) throw fail("expected a number after '" + key + "'");
            return v;
        };
        if (key == "schema_version") {
            if (static_cast<int>(next_num()) != 1) throw fail("unsupported schema_version");
            versioned = true;
        } else if (key == "seed") {
            sc.seed = static_cast<std::uint64_t>(next_num());
        } else if (key == "days") {
            sc.days = static_cast<int>(next_num());
        } else if (key == "start_date") {
            std::string d;
            if (!(ss >> d)) throw fail("expected a date");
            sc.start_date = parse_date(d);
        } else if (key == "pmu_rate_hz") {
            sc.pmu_rate = Rate(static_cast<std::int64_t>(next_num()));
        } else if (key == "peak_day") {
            sc.peak_day = next_num();
        } else if (key == "peak_width_days") {
            sc.peak_width_days = next_num();
        } else {
            const auto dot = key.find('.');
            if (dot == std::string::npos) throw fail("unknown key '" + key + "'");
            const std::string region_token = key.substr(0, dot);
            const std::string field = key.substr(dot + 1);
            RegionScenario* rs = nullptr;
            try {
                rs = &region_of(sc, region_token);
            } catch (const std::invalid_argument&) {
                throw fail("unknown region '" + region_token + "'");
            }
            if (field == "tone") {
                if (!tones_cleared[parse_region(region_token)]) {
                    rs->tones.clear();   // scenario tones replace defaults
                    tones_cleared[parse_region(region_token)] = true;
                }
                const double f = next_num();
                const double a = next_num();
                rs->tones.push_back({f, a});
            } else if (field == "demand_base_mw") rs->demand_base_mw = next_num();
            else if (field == "demand_swing") rs->demand_swing = next_num();
            else if (field == "hydro_base_mw") rs->hydro_base_mw = next_num();
            else if (field == "thermal_base_mw") rs->thermal_base_mw = next_num();
            else if (field == "wind_base_mw") rs->wind_base_mw = next_num();
            else if (field == "wind_peak_mw") rs->wind_peak_mw = next_num();
            else if (field == "solar_peak_mw") rs->solar_peak_mw = next_num();
            else if (field == "der_peak_mw") rs->der_peak_mw = next_num();
            else if (field == "inertia_base_mws") rs->inertia_base_mws = next_num();
            else if (field == "inertia_pen_slope") rs->inertia_pen_slope = next_num();
            else if (field == "inertia_floor_mws") rs->inertia_floor_mws = next_num();
            else if (field == "noise_floor_hz") rs->noise_floor_hz = next_num();
            else if (field == "noise_pen_coupling_hz") rs->noise_pen_coupling_hz = next_num();
            else if (field == "trend_amplitude_hz") rs->trend_amplitude_hz = next_num();
            else if (field == "trend_period_s") rs->trend_period_s = next_num();
            else if (field == "curtail_scale_mw") rs->curtail_scale_mw = next_num();
            else throw fail("unknown key '" + key + "'");
        }
        std::string extra;
        if (ss >> extra) throw fail("trailing tokens after '" + key + "'");
    }
    if (!versioned)
        throw std::invalid_argument(file.string() + ": missing schema_version");
    return sc;
}

void write_synthetic_dataset(const SyntheticData& data, const SyntheticScenario& scenario,
                             const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    save_balance_csv(data.records, out_dir / "balance.csv");
    save_inertia_csv(data.records, out_dir / "inertia.csv");
    save_curtailment_csv(data.curtailment, out_dir / "curtailment.csv");
    for (const auto& [site, series] : data.pmu)
        save_pmu_csv(series, out_dir / ("pmu_" + site_name(site) + ".csv"));

    std::ofstream cfg(out_dir / "run.cfg");
    if (!cfg) throw std::runtime_error("cannot write run.cfg");
    cfg << "schema_version 1\n";
    cfg << "balance_csv " << (out_dir / "balance.csv").string() << "\n";
    cfg << "inertia_csv " << (out_dir / "inertia.csv").string() << "\n";
    cfg << "curtailment_csv " << (out_dir / "curtailment.csv").string() << "\n";
    for (const auto& [site, series] : data.pmu)
        cfg << "pmu_csv." << site_name(site) << " "
            << (out_dir / ("pmu_" + site_name(site) + ".csv")).string() << "\n";
    cfg << "pmu_rate_hz " << scenario.pmu_rate.hz() << "\n";
    cfg << "out_dir " << (out_dir / "report").string() << "\n";
    cfg << "seed " << scenario.seed << "\n";
}

} // namespace freqdyn

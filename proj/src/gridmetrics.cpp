#include "freqdyn/gridmetrics.hpp"

#include "freqdyn/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

namespace freqdyn {

std::string region_name(Region r) {
    switch (r) {
        case Region::N: return "N";
        case Region::NE: return "NE";
        case Region::S: return "S";
        case Region::SE_CW: return "SE_CW";
    }
    throw std::logic_error("bad region");
}

Region parse_region(const std::string& token) {
    if (token == "N") return Region::N;
    if (token == "NE") return Region::NE;
    if (token == "S") return Region::S;
    if (token == "SE_CW" || token == "SE-CW") return Region::SE_CW;
    throw std::invalid_argument("unknown region '" + token + "'");
}

std::string reason_name(CurtailReason r) {
    switch (r) {
        case CurtailReason::EnergyBalance: return "energy_balance";
        case CurtailReason::Reliability: return "reliability";
        case CurtailReason::ExternalUnavailability: return "external_electrical";
    }
    throw std::logic_error("bad reason");
}

CurtailReason parse_reason(const std::string& token) {
    if (token == "energy_balance") return CurtailReason::EnergyBalance;
    if (token == "reliability") return CurtailReason::Reliability;
    if (token == "external_electrical") return CurtailReason::ExternalUnavailability;
    throw std::invalid_argument("unknown curtailment reason '" + token + "'");
}

double coi_frequency(std::span<const MachineState> machines) {
    if (machines.empty())
        throw std::invalid_argument("coi_frequency: no machines");
    double num = 0.0, den = 0.0;
    for (const auto& m : machines) {
        num += m.inertia_mws * m.freq_hz;
        den += m.inertia_mws;
    }
    if (den <= 0.0)
        throw std::invalid_argument("coi_frequency: total inertia must be positive");
    return num / den;
}

double ibr_penetration(const RegionalHourRecord& record) {
    if (!(record.demand_mw > 0.0))
        throw std::invalid_argument("ibr_penetration: demand is zero; penetration undefined");
    return (record.wind_mw + record.solar_mw + record.der_mw) / record.demand_mw * 100.0;
}

double net_load(const RegionalHourRecord& record) {
    return record.demand_mw - record.wind_mw - record.solar_mw - record.der_mw;
}

std::vector<double> net_load_ramps(std::span<const double> net_loads, std::size_t horizon_h) {
    if (horizon_h == 0)
        throw std::invalid_argument("net_load_ramps: horizon must be >= 1");
    if (net_loads.size() <= horizon_h)
        throw std::invalid_argument("net_load_ramps: sequence no longer than horizon");
    std::vector<double> ramps;
    ramps.reserve(net_loads.size() - horizon_h);
    for (std::size_t i = 0; i + horizon_h < net_loads.size(); ++i)
        ramps.push_back(net_loads[i + horizon_h] - net_loads[i]);
    return ramps;
}

Histogram ramp_histogram(std::span<const double> ramps, double bin_width_mw) {
    if (ramps.empty())
        throw std::invalid_argument("ramp_histogram: empty input");
    return build_histogram(ramps, bin_width_mw);
}

CurtailmentBreakdown curtailment_breakdown(std::span<const RegionalHourRecord> records, int h0, int h1) {
    CurtailmentBreakdown out;
    std::map<CurtailReason, CurtailmentBreakdown::ReasonStats> acc;
    for (CurtailReason r : kAllReasons) acc[r] = {r, 0, 0.0, 0.0};
    for (const auto& rec : records) {
        if (!rec.curtail_reason || rec.hour < h0 || rec.hour >= h1) continue;
        auto& s = acc[*rec.curtail_reason];
        ++s.count;
        s.total_mw += rec.curtailed_wind_mw.value_or(0.0);
        ++out.total_rows;
    }
    for (CurtailReason r : kAllReasons) {
        auto s = acc[r];
        if (out.total_rows > 0)
            s.percentage = 100.0 * static_cast<double>(s.count) / static_cast<double>(out.total_rows);
        out.reasons.push_back(s);
    }
    return out;
}

std::array<double, 24> hourly_curtailment_profile(std::span<const RegionalHourRecord> records) {
    std::array<double, 24> slots{};
    for (const auto& rec : records)
        if (rec.curtailed_wind_mw && rec.hour >= 0 && rec.hour < 24)
            slots[static_cast<std::size_t>(rec.hour)] += *rec.curtailed_wind_mw;
    return slots;
}

std::vector<RegionalHourRecord> aggregate_system(std::span<const RegionalHourRecord> records) {
    std::map<std::pair<std::int64_t, int>, std::pair<RegionalHourRecord, unsigned>> hours;
    for (const auto& rec : records) {
        auto key = std::make_pair(days_from_civil(rec.date), rec.hour);
        auto& [agg, regions_seen] = hours[key];
        if (regions_seen == 0) {
            agg = RegionalHourRecord{};
            agg.date = rec.date;
            agg.hour = rec.hour;
        }
        agg.hydro_mw += rec.hydro_mw;
        agg.thermal_mw += rec.thermal_mw;
        agg.wind_mw += rec.wind_mw;
        agg.solar_mw += rec.solar_mw;
        agg.der_mw += rec.der_mw;
        agg.demand_mw += rec.demand_mw;
        regions_seen |= 1u << static_cast<unsigned>(rec.region);
    }
    std::vector<RegionalHourRecord> out;
    for (const auto& [key, value] : hours)
        if (value.second == 0xFu)   // all four regions present
            out.push_back(value.first);
    return out;
}

namespace {

constexpr const char* kBalanceHeader = "date,hour,region,hydro_mw,thermal_mw,wind_mw,solar_mw,der_mw,demand_mw";
constexpr const char* kInertiaHeader = "date,hour,region,inertia_mws";
constexpr const char* kCurtailHeader = "date,hour,region,curtailed_wind_mw,reason";

int parse_hour(std::string_view field, const std::filesystem::path& file, std::size_t line) {
    const std::int64_t h = csv::parse_int(field, file, line);
    if (h < 0 || h > 23)
        throw csv::RowError(file, line, "hour out of range [0,23]: " + std::to_string(h));
    return static_cast<int>(h);
}

double parse_mw(std::string_view field, const std::filesystem::path& file, std::size_t line) {
    const double v = csv::parse_double(field, file, line);
    if (!std::isfinite(v) || v < 0.0)
        throw csv::RowError(file, line, "power field must be finite and >= 0");
    return v;
}

} // namespace

std::vector<RegionalHourRecord> load_balance_csv(const std::filesystem::path& file,
                                                 std::vector<std::size_t>* row_numbers) {
    std::vector<RegionalHourRecord> records;
    csv::for_each_row(file, kBalanceHeader, [&](std::size_t line, const auto& f) {
        if (f.size() != 9)
            throw csv::RowError(file, line, "expected 9 fields");
        RegionalHourRecord r;
        try {
            r.date = parse_date(std::string(f[0]));
            r.region = parse_region(std::string(f[2]));
        } catch (const std::invalid_argument& e) {
            throw csv::RowError(file, line, e.what());
        }
        r.hour = parse_hour(f[1], file, line);
        r.hydro_mw = parse_mw(f[3], file, line);
        r.thermal_mw = parse_mw(f[4], file, line);
        r.wind_mw = parse_mw(f[5], file, line);
        r.solar_mw = parse_mw(f[6], file, line);
        r.der_mw = parse_mw(f[7], file, line);
        r.demand_mw = parse_mw(f[8], file, line);
        records.push_back(r);
        if (row_numbers) row_numbers->push_back(line);
    });
    return records;
}

std::vector<InertiaRow> load_inertia_csv(const std::filesystem::path& file) {
    std::vector<InertiaRow> rows;
    csv::for_each_row(file, kInertiaHeader, [&](std::size_t line, const auto& f) {
        if (f.size() != 4)
            throw csv::RowError(file, line, "expected 4 fields");
        InertiaRow r{};
        try {
            r.date = parse_date(std::string(f[0]));
            r.region = parse_region(std::string(f[2]));
        } catch (const std::invalid_argument& e) {
            throw csv::RowError(file, line, e.what());
        }
        r.hour = parse_hour(f[1], file, line);
        r.inertia_mws = parse_mw(f[3], file, line);
        rows.push_back(r);
    });
    return rows;
}

void merge_inertia(std::vector<RegionalHourRecord>& records, std::span<const InertiaRow> rows) {
    std::map<std::tuple<std::int64_t, int, Region>, double> lookup;
    for (const auto& r : rows)
        lookup[{days_from_civil(r.date), r.hour, r.region}] = r.inertia_mws;
    for (auto& rec : records) {
        auto it = lookup.find({days_from_civil(rec.date), rec.hour, rec.region});
        if (it != lookup.end()) rec.inertia_mws = it->second;
    }
}

std::vector<RegionalHourRecord> load_curtailment_csv(const std::filesystem::path& file) {
    std::vector<RegionalHourRecord> records;
    csv::for_each_row(file, kCurtailHeader, [&](std::size_t line, const auto& f) {
        if (f.size() != 5)
            throw csv::RowError(file, line, "expected 5 fields");
        RegionalHourRecord r;
        try {
            r.date = parse_date(std::string(f[0]));
            r.region = parse_region(std::string(f[2]));
            r.curtail_reason = parse_reason(std::string(f[4]));
        } catch (const std::invalid_argument& e) {
            throw csv::RowError(file, line, e.what());
        }
        r.hour = parse_hour(f[1], file, line);
        r.curtailed_wind_mw = parse_mw(f[3], file, line);
        records.push_back(r);
    });
    return records;
}

void save_balance_csv(std::span<const RegionalHourRecord> records, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << kBalanceHeader << '\n';
    for (const auto& r : records)
        out << format_date(r.date) << ',' << r.hour << ',' << region_name(r.region) << ','
            << csv::format_double(r.hydro_mw) << ',' << csv::format_double(r.thermal_mw) << ','
            << csv::format_double(r.wind_mw) << ',' << csv::format_double(r.solar_mw) << ','
            << csv::format_double(r.der_mw) << ',' << csv::format_double(r.demand_mw) << '\n';
}

void save_inertia_csv(std::span<const RegionalHourRecord> records, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << kInertiaHeader << '\n';
    for (const auto& r : records)
        if (r.inertia_mws)
            out << format_date(r.date) << ',' << r.hour << ',' << region_name(r.region) << ','
                << csv::format_double(*r.inertia_mws) << '\n';
}

void save_curtailment_csv(std::span<const RegionalHourRecord> records, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << kCurtailHeader << '\n';
    for (const auto& r : records)
        if (r.curtail_reason)
            out << format_date(r.date) << ',' << r.hour << ',' << region_name(r.region) << ','
                << csv::format_double(r.curtailed_wind_mw.value_or(0.0)) << ','
                << reason_name(*r.curtail_reason) << '\n';
}

} // namespace freqdyn

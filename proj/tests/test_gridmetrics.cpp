#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "freqdyn/gridmetrics.hpp"

#include <filesystem>
#include <fstream>
#include <random>

using namespace freqdyn;
namespace fs = std::filesystem;

namespace {

RegionalHourRecord balance_record(double wind, double solar, double der, double demand,
                                  Region region = Region::NE, int hour = 12) {
    RegionalHourRecord r;
    r.region = region;
    r.date = Date{2023, 7, 1};
    r.hour = hour;
    r.wind_mw = wind;
    r.solar_mw = solar;
    r.der_mw = der;
    r.demand_mw = demand;
    return r;
}

RegionalHourRecord curtail_row(int hour, double mw, CurtailReason reason) {
    RegionalHourRecord r;
    r.region = Region::NE;
    r.date = Date{2023, 7, 1};
    r.hour = hour;
    r.curtailed_wind_mw = mw;
    r.curtail_reason = reason;
    return r;
}

} // namespace

TEST_CASE("coi_frequency averages with inertia weights") {
    const MachineState equal[] = {{5.0, 60.0}, {5.0, 59.9}};
    CHECK(coi_frequency(equal) == doctest::Approx(59.95).epsilon(1e-12));

    // Direct weighted-average evaluation: (1*60 + 2*60.1 + 3*59.9) / 6.
    const MachineState mixed[] = {{1.0, 60.0}, {2.0, 60.1}, {3.0, 59.9}};
    const double expected = (1.0 * 60.0 + 2.0 * 60.1 + 3.0 * 59.9) / 6.0;
    CHECK(coi_frequency(mixed) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(coi_frequency(mixed) == doctest::Approx(59.983333333333334).epsilon(1e-12));

    const MachineState single[] = {{7.5, 59.97}};
    CHECK(coi_frequency(single) == 59.97);
}

TEST_CASE("coi_frequency stays within machine range and ignores inertia scale") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> freq(59.5, 60.5);
    std::uniform_real_distribution<double> inertia(0.1, 100.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<MachineState> machines(1 + trial % 7);
        for (auto& m : machines) m = {inertia(rng), freq(rng)};
        const double coi = coi_frequency(machines);
        double lo = machines[0].freq_hz, hi = machines[0].freq_hz;
        for (const auto& m : machines) {
            lo = std::min(lo, m.freq_hz);
            hi = std::max(hi, m.freq_hz);
        }
        CHECK(coi >= lo - 1e-12);
        CHECK(coi <= hi + 1e-12);
        auto scaled = machines;
        for (auto& m : scaled) m.inertia_mws *= 17.5;
        CHECK(coi_frequency(scaled) == doctest::Approx(coi).epsilon(1e-12));
    }
}

TEST_CASE("coi_frequency error cases") {
    CHECK_THROWS_AS((void)coi_frequency({}), std::invalid_argument);
    const MachineState zeros[] = {{0.0, 60.0}};
    CHECK_THROWS_AS((void)coi_frequency(zeros), std::invalid_argument);
}

TEST_CASE("ibr_penetration basic values") {
    CHECK(ibr_penetration(balance_record(0, 0, 0, 100)) == 0.0);
    // Annual-average fixture: wind 10009, solar+DER 1821, demand 12117.
    const double r = ibr_penetration(balance_record(10009, 1821, 0, 12117));
    CHECK(r == doctest::Approx(97.63).epsilon(1e-4));
    CHECK(r == doctest::Approx(100.0 * 11830.0 / 12117.0).epsilon(1e-14));
    CHECK(ibr_penetration(balance_record(150, 30, 20, 100)) == doctest::Approx(200.0));
    CHECK_THROWS_AS((void)ibr_penetration(balance_record(1, 1, 1, 0)), std::invalid_argument);
}

TEST_CASE("ibr_penetration ignores uniform power scaling") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> mw(0.0, 5000.0);
    for (int trial = 0; trial < 40; ++trial) {
        auto r = balance_record(mw(rng), mw(rng), mw(rng), 1.0 + mw(rng));
        const double base = ibr_penetration(r);
        r.wind_mw *= 3.25;
        r.solar_mw *= 3.25;
        r.der_mw *= 3.25;
        r.demand_mw *= 3.25;
        CHECK(ibr_penetration(r) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("net_load substitution and sign convention") {
    CHECK(net_load(balance_record(10, 5, 5, 100)) == doctest::Approx(80.0));
    CHECK(net_load(balance_record(100, 10, 10, 100)) == doctest::Approx(-20.0));
    CHECK(net_load(balance_record(0, 0, 0, 0)) == 0.0);
}

TEST_CASE("net_load_ramps over horizons") {
    const std::vector<double> nl{10, 12, 15, 11};
    CHECK(net_load_ramps(nl, 1) == std::vector<double>{2, 3, -4});
    CHECK(net_load_ramps(nl, 3) == std::vector<double>{1});
    CHECK_THROWS_AS((void)net_load_ramps(nl, 4), std::invalid_argument);
    CHECK_THROWS_AS((void)net_load_ramps(nl, 0), std::invalid_argument);
}

TEST_CASE("duck-profile 12 h ramp equals the brute-force extreme") {
    // Solar-duck net load: midday trough, evening peak.
    std::vector<double> nl(24);
    for (int h = 0; h < 24; ++h) {
        const double solar = h >= 6 && h < 18 ? 40.0 * std::sin(3.14159265358979 * (h - 6) / 12.0) : 0.0;
        const double demand = 80.0 + 25.0 * std::exp(-0.5 * std::pow((h - 19.0) / 2.0, 2.0));
        nl[static_cast<std::size_t>(h)] = demand - solar;
    }
    const auto ramps = net_load_ramps(nl, 12);
    double brute = -1e300;
    for (std::size_t i = 0; i + 12 < nl.size(); ++i) brute = std::max(brute, nl[i + 12] - nl[i]);
    CHECK(*std::max_element(ramps.begin(), ramps.end()) == doctest::Approx(brute).epsilon(1e-14));
}

TEST_CASE("h=1 ramps telescope to the endpoint difference") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> mw(-50.0, 50.0);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> nl(5 + static_cast<std::size_t>(trial));
        for (auto& v : nl) v = mw(rng);
        const auto ramps = net_load_ramps(nl, 1);
        double sum = 0.0;
        for (double r : ramps) sum += r;
        CHECK(sum == doctest::Approx(nl.back() - nl.front()).epsilon(1e-10));
    }
}

TEST_CASE("ramp_histogram bins and degenerate input") {
    const std::vector<double> ramps{1.0, 1.0, 2.0};
    const auto h = ramp_histogram(ramps, 1.0);
    CHECK(h.first_bin == 1);
    REQUIRE(h.counts.size() == 2);
    CHECK(h.counts[0] == 2);   // [1,2)
    CHECK(h.counts[1] == 1);   // [2,3)
    CHECK(h.total == 3);
    CHECK_THROWS_AS((void)ramp_histogram({}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)ramp_histogram(ramps, 0.0), std::invalid_argument);
}

TEST_CASE("ramp_histogram of symmetric ramps is mirror-symmetric") {
    const std::vector<double> ramps{-3.0, -1.0, 1.0, 3.0};
    const auto h = ramp_histogram(ramps, 2.0);
    REQUIRE(h.counts.size() == 4);   // bins [-4,-2) [-2,0) [0,2) [2,4)
    CHECK(h.counts[0] == h.counts[3]);
    CHECK(h.counts[1] == h.counts[2]);
    CHECK(h.total == 4);
}

TEST_CASE("curtailment_breakdown reproduces the reference percentages") {
    std::vector<RegionalHourRecord> rows;
    const std::size_t counts[] = {39270, 19650, 16818};
    const CurtailReason reasons[] = {CurtailReason::EnergyBalance, CurtailReason::Reliability,
                                     CurtailReason::ExternalUnavailability};
    for (int k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < counts[k]; ++i)
            rows.push_back(curtail_row(8 + static_cast<int>(i % 3), 1.0, reasons[k]));
    const auto b = curtailment_breakdown(rows, 8, 11);
    REQUIRE(b.reasons.size() == 3);
    CHECK(b.total_rows == 75738);
    CHECK(b.reasons[0].percentage == doctest::Approx(51.85).epsilon(2e-4));
    CHECK(b.reasons[1].percentage == doctest::Approx(25.94).epsilon(2e-4));
    CHECK(b.reasons[2].percentage == doctest::Approx(22.21).epsilon(3e-4));
    double sum = 0.0;
    for (const auto& r : b.reasons) sum += r.percentage;
    CHECK(sum == doctest::Approx(100.0).epsilon(1e-6));
}

TEST_CASE("curtailment_breakdown single reason and hour filtering") {
    std::vector<RegionalHourRecord> rows{curtail_row(9, 5.0, CurtailReason::Reliability),
                                         curtail_row(15, 7.0, CurtailReason::EnergyBalance)};
    const auto b = curtailment_breakdown(rows, 8, 11);
    CHECK(b.total_rows == 1);
    CHECK(b.reasons[1].percentage == doctest::Approx(100.0));
    CHECK(b.reasons[0].count == 0);
    const auto empty = curtailment_breakdown(rows, 0, 5);
    CHECK(empty.total_rows == 0);
}

TEST_CASE("hourly_curtailment_profile sums per slot") {
    std::vector<RegionalHourRecord> rows{curtail_row(9, 100.0, CurtailReason::EnergyBalance)};
    auto slots = hourly_curtailment_profile(rows);
    CHECK(slots[9] == 100.0);
    for (int h = 0; h < 24; ++h)
        if (h != 9) CHECK(slots[static_cast<std::size_t>(h)] == 0.0);

    rows.clear();
    for (int d = 0; d < 2; ++d)
        for (int h = 0; h < 24; ++h) rows.push_back(curtail_row(h, 1.0, CurtailReason::Reliability));
    slots = hourly_curtailment_profile(rows);
    for (int h = 0; h < 24; ++h) CHECK(slots[static_cast<std::size_t>(h)] == doctest::Approx(2.0));
}

TEST_CASE("aggregate_system sums regions and drops incomplete hours") {
    std::vector<RegionalHourRecord> rows;
    for (Region r : kAllRegions) rows.push_back(balance_record(10, 5, 5, 100, r, 10));
    for (Region r : {Region::N, Region::NE, Region::S}) rows.push_back(balance_record(1, 1, 1, 50, r, 11));
    const auto sys = aggregate_system(rows);
    REQUIRE(sys.size() == 1);
    CHECK(sys[0].hour == 10);
    CHECK(sys[0].demand_mw == doctest::Approx(400.0));
    CHECK(sys[0].wind_mw == doctest::Approx(40.0));
}

TEST_CASE("balance CSV round trip and row-cited errors") {
    const fs::path path = fs::temp_directory_path() / "freqdyn_balance.csv";
    std::vector<RegionalHourRecord> rows;
    for (Region r : kAllRegions) rows.push_back(balance_record(10.5, 5.25, 2.125, 101.0, r, 7));
    rows[0].inertia_mws = 27198.0;
    save_balance_csv(rows, path);
    const auto loaded = load_balance_csv(path);
    REQUIRE(loaded.size() == rows.size());
    CHECK(loaded[0].wind_mw == 10.5);
    CHECK(loaded[0].region == rows[0].region);
    CHECK(loaded[2].date == rows[2].date);

    {
        std::ofstream out(path);
        out << "date,hour,region,hydro_mw,thermal_mw,wind_mw,solar_mw,der_mw,demand_mw\n";
        out << "2023-07-01,7,NE,1,1,1,1,1,100\n";
        out << "2023-07-01,25,NE,1,1,1,1,1,100\n";
    }
    CHECK_THROWS_WITH_AS((void)load_balance_csv(path), doctest::Contains("row 3"), std::runtime_error);
    {
        std::ofstream out(path);
        out << "date,hour,region,hydro_mw,thermal_mw,wind_mw,solar_mw,der_mw,demand_mw\n";
        out << "2023-07-01,7,XX,1,1,1,1,1,100\n";
    }
    CHECK_THROWS_WITH_AS((void)load_balance_csv(path), doctest::Contains("region"), std::runtime_error);
    {
        std::ofstream out(path);
        out << "date,hour,region,hydro_mw,thermal_mw,wind_mw,solar_mw,der_mw,demand_mw\n";
        out << "2023-07-01,7,NE,1,1,-3,1,1,100\n";
    }
    CHECK_THROWS_AS((void)load_balance_csv(path), std::runtime_error);
    fs::remove(path);
}

TEST_CASE("inertia rows merge onto matching region-hours") {
    std::vector<RegionalHourRecord> records{balance_record(1, 1, 1, 100, Region::NE, 7),
                                            balance_record(1, 1, 1, 100, Region::S, 7)};
    const InertiaRow rows[] = {{Date{2023, 7, 1}, 7, Region::NE, 27198.0}};
    merge_inertia(records, rows);
    REQUIRE(records[0].inertia_mws.has_value());
    CHECK(*records[0].inertia_mws == 27198.0);
    CHECK_FALSE(records[1].inertia_mws.has_value());
}

TEST_CASE("curtailment CSV round trip") {
    const fs::path path = fs::temp_directory_path() / "freqdyn_curtail.csv";
    std::vector<RegionalHourRecord> rows{curtail_row(9, 123.5, CurtailReason::ExternalUnavailability)};
    save_curtailment_csv(rows, path);
    const auto loaded = load_curtailment_csv(path);
    REQUIRE(loaded.size() == 1);
    CHECK(*loaded[0].curtailed_wind_mw == 123.5);
    CHECK(*loaded[0].curtail_reason == CurtailReason::ExternalUnavailability);
    fs::remove(path);
}

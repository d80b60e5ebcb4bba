#include "freqdyn/pipeline.hpp"

#include "freqdyn/csv.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace freqdyn {

std::string site_name(Site s) {
    switch (s) {
        case Site::NE: return "NE";
        case Site::N: return "N";
        case Site::CW: return "CW";
        case Site::SE: return "SE";
        case Site::S: return "S";
    }
    throw std::logic_error("bad site");
}

Site parse_site(const std::string& token) {
    for (Site s : kAllSites)
        if (site_name(s) == token) return s;
    throw std::invalid_argument("unknown site '" + token + "'");
}

Region site_region(Site s) {
    switch (s) {
        case Site::NE: return Region::NE;
        case Site::N: return Region::N;
        case Site::CW: return Region::SE_CW;
        case Site::SE: return Region::SE_CW;
        case Site::S: return Region::S;
    }
    throw std::logic_error("bad site");
}

std::string stage_name(Stage s) {
    switch (s) {
        case Stage::Ingest: return "ingest";
        case Stage::Vmd: return "vmd";
        case Stage::Stats: return "stats";
    }
    throw std::logic_error("bad stage");
}

CriticalWeek select_critical_week(std::span<const RegionalHourRecord> records, Region region) {
    // Hourly penetration keyed by day; only complete days can enter a window.
    std::map<std::int64_t, std::array<std::optional<double>, 24>> days;
    for (const auto& rec : records) {
        if (rec.region != region) continue;
        if (!(rec.demand_mw > 0.0)) continue;   // undefined penetration hour
        days[days_from_civil(rec.date)][static_cast<std::size_t>(rec.hour)] = ibr_penetration(rec);
    }
    std::map<std::int64_t, double> day_mean;
    for (const auto& [day, hours] : days) {
        double sum = 0.0;
        bool complete = true;
        for (const auto& h : hours) {
            if (!h) { complete = false; break; }
            sum += *h;
        }
        if (complete) day_mean[day] = sum / 24.0;
    }

    bool found = false;
    std::int64_t best_start = 0;
    double best_mean = 0.0;
    for (const auto& [day, mean] : day_mean) {
        double sum = mean;
        bool ok = true;
        for (int d = 1; d < 7; ++d) {
            auto it = day_mean.find(day + d);
            if (it == day_mean.end()) { ok = false; break; }
            sum += it->second;
        }
        if (!ok) continue;
        const double window_mean = sum / 7.0;
        if (!found || window_mean > best_mean) {   // strict '>' keeps earliest tie
            found = true;
            best_start = day;
            best_mean = window_mean;
        }
    }
    if (!found)
        throw std::runtime_error("select_critical_week: no 7 consecutive days of complete hourly data for " +
                                 region_name(region));
    CriticalWeek week;
    week.start_date = civil_from_days(best_start);
    week.end_date = civil_from_days(best_start + 6);
    week.region = region;
    week.mean_penetration_pct = best_mean;
    return week;
}

namespace {

/// Slice one [h0,h1) window of a day, fill small gaps, decompose. Returns
/// nullopt (with a note) when the window is unusable.
std::optional<DecompositionSplit> decompose_window(const TimeSeries& series, const Date& day,
                                                   HourRange hours, const VmdConfig& vmd,
                                                   std::size_t max_gap, std::string& note) {
    TimeSeries win;
    try {
        win = slice_window(series, epoch_ms(day, hours.begin_hour), epoch_ms(day, hours.end_hour));
    } catch (const std::exception& e) {
        note = e.what();
        return std::nullopt;
    }
    auto filled = fill_gaps(win, max_gap);
    if (filled.series.has_gaps()) {
        note = "unfillable gaps (" + std::to_string(filled.unfilled_gap_samples) + " samples)";
        return std::nullopt;
    }
    const std::size_t expected = static_cast<std::size_t>(
        (hours.end_hour - hours.begin_hour) * 3600 * filled.series.rate.num / filled.series.rate.den);
    if (filled.series.size() != expected) {
        note = "window short: " + std::to_string(filled.series.size()) + " of " + std::to_string(expected) +
               " samples";
        return std::nullopt;
    }
    return split_qss_dynamic(filled.series, vmd);
}

} // namespace

FormGroupsResult form_groups(const std::map<Site, TimeSeries>& pmu_week, const CriticalWeek& week,
                             const VmdConfig& vmd, HourRange group1_hours, HourRange group2_hours,
                             std::size_t max_gap_samples) {
    FormGroupsResult out;
    out.group1.label = GroupLabel::GroupI;
    out.group1.hours = group1_hours;
    out.group2.label = GroupLabel::GroupII;
    out.group2.hours = group2_hours;
    for (const auto& [site, series] : pmu_week) {
        for (int d = 0; d < 7; ++d) {
            const Date day = add_days(week.start_date, d);
            for (auto* group : {&out.group1, &out.group2}) {
                std::string note;
                auto split = decompose_window(series, day, group->hours, vmd, max_gap_samples, note);
                if (split)
                    group->windows[site].push_back({day, std::move(*split)});
                else
                    out.skipped.push_back(site_name(site) + " " + format_date(day) + " [" +
                                          std::to_string(group->hours.begin_hour) + "," +
                                          std::to_string(group->hours.end_hour) + "): " + note);
            }
        }
    }
    return out;
}

namespace {

struct HourKey {
    std::int64_t day;
    int hour;
    auto operator<=>(const HourKey&) const = default;
};

struct SiteAccumulator {
    HistogramAccumulator hist1, hist2;
    std::vector<std::vector<double>> acf1, acf2;
    std::map<HourKey, double> sigma_by_hour;
    std::vector<double> spectrum_sum;   // accumulated window amplitude spectra
    std::size_t spectrum_count = 0;
    double spectrum_resolution = 0.0;
    std::size_t windows_done = 0, windows_skipped = 0;

    explicit SiteAccumulator(double bin_width) : hist1(bin_width), hist2(bin_width) {}
};

} // namespace

FrameworkReport evaluate_framework(const FrameworkInputs& inputs, const FrameworkConfig& config) {
    FrameworkReport report;
    report.group1_hours = config.group1;
    report.group2_hours = config.group2;

    // Stage (i): hourly penetration per region.
    std::map<std::tuple<Region, std::int64_t, int>, double> penetration;
    std::map<std::tuple<Region, std::int64_t, int>, double> inertia;
    try {
        if (inputs.records.empty())
            throw std::runtime_error("no balance records");
        if (inputs.pmu.empty())
            throw std::runtime_error("no PMU series");
        for (const auto& rec : inputs.records) {
            if (!(rec.demand_mw > 0.0)) continue;
            const auto key = std::make_tuple(rec.region, days_from_civil(rec.date), rec.hour);
            penetration[key] = ibr_penetration(rec);
            if (rec.inertia_mws) inertia[key] = *rec.inertia_mws;
        }
    } catch (const std::exception& e) {
        throw StageError(Stage::Ingest, e.what());
    }
    report.stages.push_back({"penetration", std::to_string(penetration.size()) + " region-hours evaluated"});

    // Stage (ii): critical week on the focus region.
    try {
        report.critical_week = select_critical_week(inputs.records, config.focus_region);
    } catch (const std::exception& e) {
        throw StageError(Stage::Ingest, e.what());
    }
    report.stages.push_back(
        {"critical-week", format_date(report.critical_week.start_date) + ".." +
                              format_date(report.critical_week.end_date) + " mean " +
                              csv::format_double(report.critical_week.mean_penetration_pct) + "%"});

    // Stage (iii)+(iv): decompose every 3-hour window of the week per site,
    // accumulating group statistics and hourly sigma_f as windows stream by.
    std::map<Site, SiteAccumulator> acc;
    for (const auto& [site, series] : inputs.pmu)
        acc.emplace(site, SiteAccumulator(config.hist_bin_width_hz));

    std::size_t total_windows = 0;
    try {
        for (const auto& [site, series] : inputs.pmu) {
            auto& a = acc.at(site);
            const std::int64_t samples_per_hour = 3600 * series.rate.num / series.rate.den;
            if (samples_per_hour * series.rate.den != 3600 * series.rate.num || samples_per_hour < 2)
                throw std::runtime_error("PMU rate must yield whole samples per hour");

            std::set<std::pair<int, int>> window_set;
            for (int h = 0; h + 3 <= 24; h += 3) window_set.insert({h, h + 3});
            window_set.insert({config.group1.begin_hour, config.group1.end_hour});
            window_set.insert({config.group2.begin_hour, config.group2.end_hour});

            for (int d = 0; d < 7; ++d) {
                const Date day = add_days(report.critical_week.start_date, d);
                for (const auto& [h0, h1] : window_set) {
                    const bool in_group1 = h0 == config.group1.begin_hour && h1 == config.group1.end_hour;
                    const bool in_group2 = h0 == config.group2.begin_hour && h1 == config.group2.end_hour;
                    std::string note;
                    auto split = decompose_window(series, day, {h0, h1}, config.vmd,
                                                  config.max_gap_samples, note);
                    ++total_windows;
                    if (!split) {
                        ++a.windows_skipped;
                        report.warnings.push_back("skipped " + site_name(site) + " " + format_date(day) +
                                                  " [" + std::to_string(h0) + "," + std::to_string(h1) +
                                                  "): " + note);
                        continue;
                    }
                    ++a.windows_done;
                    const auto& dyn = split->dynamic;

                    // Hourly sigma_f from the window's dynamic component.
                    const auto sigmas = windowed_std(dyn, static_cast<std::size_t>(samples_per_hour));
                    for (std::size_t h = 0; h < sigmas.size(); ++h)
                        a.sigma_by_hour[{days_from_civil(day), h0 + static_cast<int>(h)}] = sigmas[h];

                    if (in_group1 || in_group2) {
                        auto& hist = in_group1 ? a.hist1 : a.hist2;
                        auto& acfs = in_group1 ? a.acf1 : a.acf2;
                        hist.add(dyn.values);
                        if (dyn.size() > config.acf_max_lag + 1)
                            acfs.push_back(acf(dyn, config.acf_max_lag));
                        const auto spec = amplitude_spectrum(dyn);
                        if (a.spectrum_sum.empty()) {
                            a.spectrum_sum.assign(spec.amplitude.size(), 0.0);
                            a.spectrum_resolution = spec.freq_resolution_hz;
                        }
                        if (spec.amplitude.size() == a.spectrum_sum.size()) {
                            for (std::size_t i = 0; i < spec.amplitude.size(); ++i)
                                a.spectrum_sum[i] += spec.amplitude[i];
                            ++a.spectrum_count;
                        }
                    }
                }
            }
            if (a.windows_done == 0)
                throw std::runtime_error("no usable windows for site " + site_name(site) +
                                         " over the critical week");
        }
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(Stage::Vmd, e.what());
    }
    report.stages.push_back({"fluctuation-extraction", std::to_string(total_windows) + " windows decomposed"});

    // Stage (iv): assemble per-site reports.
    try {
        for (const auto& [site, series] : inputs.pmu) {
            auto& a = acc.at(site);
            SiteGroupReport g1, g2;
            g1.hist = a.hist1.finalize();
            g2.hist = a.hist2.finalize();
            g1.sigma_f = std::sqrt(a.hist1.variance());
            g2.sigma_f = std::sqrt(a.hist2.variance());
            g1.acf_windows = std::move(a.acf1);
            g2.acf_windows = std::move(a.acf2);
            report.group1.emplace(site, std::move(g1));
            report.group2.emplace(site, std::move(g2));

            SiteSpectrumReport sp;
            sp.freq_resolution_hz = a.spectrum_resolution;
            if (a.spectrum_count > 0) {
                sp.mean_spectrum.freq_resolution_hz = a.spectrum_resolution;
                sp.mean_spectrum.amplitude = a.spectrum_sum;
                for (double& v : sp.mean_spectrum.amplitude) v /= static_cast<double>(a.spectrum_count);
                sp.peaks = find_spectrum_peaks(sp.mean_spectrum, config.spectrum_min_prominence);
                for (const auto& p : sp.peaks)
                    if (p.freq_hz >= config.osc_min_freq_hz) { sp.oscillation_detected = true; break; }
            }
            report.spectra.emplace(site, std::move(sp));
        }

        if (inputs.has_inertia) {
            std::map<Site, SiteCorrelationReport> corr;
            for (const auto& [site, series] : inputs.pmu) {
                auto& a = acc.at(site);
                const Region region = site_region(site);
                std::vector<double> s, h, p;
                for (const auto& [key, sigma] : a.sigma_by_hour) {
                    const auto tkey = std::make_tuple(region, key.day, key.hour);
                    const auto pit = penetration.find(tkey);
                    const auto iit = inertia.find(tkey);
                    if (pit == penetration.end() || iit == inertia.end()) continue;
                    s.push_back(sigma);
                    h.push_back(iit->second);
                    p.push_back(pit->second);
                }
                const auto dc = correlate_fluctuation_drivers(s, h, p);
                corr[site] = {dc.r_inertia, dc.r_ibr, dc.n_hours};
            }
            report.correlations = std::move(corr);
        } else {
            report.warnings.push_back("inertia data absent; correlation section omitted");
        }
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(Stage::Stats, e.what());
    }
    std::ostringstream s4;
    s4 << "histograms, ACF and spectra for " << inputs.pmu.size() << " sites";
    if (!inputs.has_inertia) s4 << " (correlations omitted)";
    report.stages.push_back({"dynamic-evaluation", s4.str()});
    return report;
}

namespace {

nlohmann::ordered_json histogram_json(const Histogram& h) {
    nlohmann::ordered_json j;
    j["bin_width"] = h.bin_width;
    j["first_bin"] = h.first_bin;
    j["counts"] = h.counts;
    j["total"] = h.total;
    j["skewness"] = h.skewness;
    return j;
}

nlohmann::ordered_json group_json(const std::map<Site, SiteGroupReport>& group, HourRange hours) {
    nlohmann::ordered_json j;
    j["hours"] = {hours.begin_hour, hours.end_hour};
    nlohmann::ordered_json sites;
    for (const auto& [site, rep] : group) {
        nlohmann::ordered_json s;
        s["sigma_f"] = rep.sigma_f;
        s["skewness"] = rep.hist.skewness;
        s["histogram"] = histogram_json(rep.hist);
        s["acf_windows"] = rep.acf_windows;
        sites[site_name(site)] = std::move(s);
    }
    j["sites"] = std::move(sites);
    return j;
}

} // namespace

std::string report_json(const FrameworkReport& report) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["critical_week"] = {
        {"start_date", format_date(report.critical_week.start_date)},
        {"end_date", format_date(report.critical_week.end_date)},
        {"region", region_name(report.critical_week.region)},
        {"mean_penetration_pct", report.critical_week.mean_penetration_pct},
    };
    j["group1"] = group_json(report.group1, report.group1_hours);
    j["group2"] = group_json(report.group2, report.group2_hours);
    if (report.correlations) {
        nlohmann::ordered_json c;
        for (const auto& [site, rep] : *report.correlations)
            c[site_name(site)] = {{"r_inertia", rep.r_inertia}, {"r_ibr", rep.r_ibr}, {"hours", rep.n_hours}};
        j["correlations"] = std::move(c);
    } else {
        j["correlations"] = nullptr;
    }
    nlohmann::ordered_json spectra;
    for (const auto& [site, rep] : report.spectra) {
        nlohmann::ordered_json s;
        s["freq_resolution_hz"] = rep.freq_resolution_hz;
        s["oscillation_detected"] = rep.oscillation_detected;
        nlohmann::ordered_json peaks = nlohmann::ordered_json::array();
        for (const auto& p : rep.peaks)
            peaks.push_back({{"freq_hz", p.freq_hz}, {"amplitude", p.amplitude}, {"prominence", p.prominence}});
        s["peaks"] = std::move(peaks);
        spectra[site_name(site)] = std::move(s);
    }
    j["spectra"] = std::move(spectra);
    nlohmann::ordered_json stages = nlohmann::ordered_json::array();
    for (const auto& st : report.stages) stages.push_back({{"stage", st.stage}, {"summary", st.summary}});
    j["stages"] = std::move(stages);
    j["warnings"] = report.warnings;
    return j.dump(2);
}

void write_report(const FrameworkReport& report, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    fs::create_directories(out_dir / "histograms");
    fs::create_directories(out_dir / "acf");
    fs::create_directories(out_dir / "spectra");
    {
        std::ofstream out(out_dir / "report.json", std::ios::binary);
        if (!out) throw std::runtime_error("cannot write report.json");
        out << report_json(report) << '\n';
    }
    auto dump_group = [&](const std::map<Site, SiteGroupReport>& group, const std::string& tag) {
        for (const auto& [site, rep] : group) {
            write_histogram_csv(rep.hist, out_dir / "histograms" / (tag + "_" + site_name(site) + ".csv"));
            write_acf_csv(rep.acf_windows, out_dir / "acf" / (tag + "_" + site_name(site) + ".csv"));
        }
    };
    dump_group(report.group1, "group1");
    dump_group(report.group2, "group2");
    for (const auto& [site, rep] : report.spectra)
        if (!rep.mean_spectrum.amplitude.empty())
            write_spectrum_csv(rep.mean_spectrum, out_dir / "spectra" / (site_name(site) + ".csv"));
}

} // namespace freqdyn

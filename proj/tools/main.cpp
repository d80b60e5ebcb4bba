#include "freqdyn/csv.hpp"
#include "freqdyn/gridmetrics.hpp"
#include "freqdyn/pipeline.hpp"
#include "freqdyn/stats.hpp"
#include "freqdyn/synth.hpp"
#include "freqdyn/timeseries.hpp"
#include "freqdyn/vmd.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace freqdyn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNonConverged = 3;
constexpr int kExitIngest = 4;
constexpr int kExitVmd = 5;
constexpr int kExitStats = 6;

struct NonConvergedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

VmdInit parse_init(const std::string& token) {
    if (token == "uniform") return VmdInit::Uniform;
    if (token == "zero") return VmdInit::Zero;
    if (token == "random") return VmdInit::Random;
    throw std::invalid_argument("unknown init scheme '" + token + "' (uniform|zero|random)");
}

Rate parse_rate(double hz) {
    // Accept integer rates and simple sub-hertz rationals like 0.5.
    if (hz >= 1.0) {
        if (hz != std::floor(hz))
            throw std::invalid_argument("non-integer rates above 1 Hz are not supported");
        return Rate(static_cast<std::int64_t>(hz));
    }
    const double inv = 1.0 / hz;
    if (!(inv > 0.0) || inv != std::floor(inv))
        throw std::invalid_argument("unsupported sample rate");
    return Rate(1, static_cast<std::int64_t>(inv));
}

struct RunConfig {
    fs::path balance_csv;
    std::optional<fs::path> inertia_csv;
    std::optional<fs::path> curtailment_csv;
    std::map<Site, fs::path> pmu_csv;
    Rate pmu_rate{30, 1};
    double decimate_target_hz = 0.0;   // 0 = keep native rate
    fs::path out_dir = "out";
    FrameworkConfig framework;
    std::uint64_t seed = 0;
};

RunConfig load_run_config(const fs::path& file) {
    std::ifstream in(file);
    if (!in)
        throw std::invalid_argument("cannot open config " + file.string());
    RunConfig cfg;
    bool versioned = false;
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
        auto next_str = [&]() {
            std::string v;
            if (!(ss >> v)) throw fail("expected a value after '" + key + "'");
            return v;
        };
        auto next_num = [&]() {
            double v = 0.0;
            if (!(ss >> v)) throw fail("expected a number after '" + key + "'");
            return v;
        };
        if (key == "schema_version") {
            if (static_cast<int>(next_num()) != 1) throw fail("unsupported schema_version");
            versioned = true;
        } else if (key == "balance_csv") cfg.balance_csv = next_str();
        else if (key == "inertia_csv") cfg.inertia_csv = next_str();
        else if (key == "curtailment_csv") cfg.curtailment_csv = next_str();
        else if (key.rfind("pmu_csv.", 0) == 0) {
            Site site;
            try {
                site = parse_site(key.substr(8));
            } catch (const std::invalid_argument& e) {
                throw fail(e.what());
            }
            cfg.pmu_csv[site] = next_str();
        } else if (key == "pmu_rate_hz") cfg.pmu_rate = parse_rate(next_num());
        else if (key == "decimate_target_hz") cfg.decimate_target_hz = next_num();
        else if (key == "out_dir") cfg.out_dir = next_str();
        else if (key == "focus_region") cfg.framework.focus_region = parse_region(next_str());
        else if (key == "vmd.modes") cfg.framework.vmd.n_modes = static_cast<int>(next_num());
        else if (key == "vmd.alpha") cfg.framework.vmd.alpha = next_num();
        else if (key == "vmd.tau") cfg.framework.vmd.tau = next_num();
        else if (key == "vmd.tol") cfg.framework.vmd.tol = next_num();
        else if (key == "vmd.max_iters") cfg.framework.vmd.max_iters = static_cast<int>(next_num());
        else if (key == "vmd.init") cfg.framework.vmd.init = parse_init(next_str());
        else if (key == "vmd.seed") cfg.framework.vmd.seed = static_cast<std::uint64_t>(next_num());
        else if (key == "group1.hours") {
            cfg.framework.group1.begin_hour = static_cast<int>(next_num());
            cfg.framework.group1.end_hour = static_cast<int>(next_num());
        } else if (key == "group2.hours") {
            cfg.framework.group2.begin_hour = static_cast<int>(next_num());
            cfg.framework.group2.end_hour = static_cast<int>(next_num());
        } else if (key == "hist.bin_width_hz") cfg.framework.hist_bin_width_hz = next_num();
        else if (key == "acf.max_lag") cfg.framework.acf_max_lag = static_cast<std::size_t>(next_num());
        else if (key == "spectrum.min_prominence_hz") cfg.framework.spectrum_min_prominence = next_num();
        else if (key == "spectrum.osc_min_freq_hz") cfg.framework.osc_min_freq_hz = next_num();
        else if (key == "max_gap_samples") cfg.framework.max_gap_samples = static_cast<std::size_t>(next_num());
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(next_num());
        else throw fail("unknown key '" + key + "'");
        std::string extra;
        if (ss >> extra) throw fail("trailing tokens after '" + key + "'");
    }
    if (!versioned)
        throw std::invalid_argument(file.string() + ": missing schema_version");
    if (cfg.balance_csv.empty())
        throw std::invalid_argument(file.string() + ": balance_csv is required");
    if (cfg.pmu_csv.empty())
        throw std::invalid_argument(file.string() + ": at least one pmu_csv.<SITE> is required");
    return cfg;
}

void require_file(const fs::path& p) {
    if (!fs::exists(p))
        throw std::invalid_argument("input file not found: " + p.string());
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + p.string());
    return out;
}

// ---------------------------------------------------------------------------
// decompose

int cmd_decompose(const fs::path& input, const fs::path& out_dir, const VmdConfig& vmd, double rate_hz,
                  bool strict, bool quiet) {
    require_file(input);
    fs::create_directories(out_dir);
    const TimeSeries raw = load_pmu_csv(input, parse_rate(rate_hz));
    const auto filled = fill_gaps(raw);
    if (filled.series.has_gaps())
        throw std::invalid_argument(input.string() + ": series keeps unfillable gaps; cannot decompose");
    const VmdResult result = vmd_decompose(filled.series, vmd);

    auto modes_csv = open_out(out_dir / "modes.csv");
    modes_csv << "timestamp_ms";
    for (std::size_t k = 0; k < result.modes.size(); ++k) modes_csv << ",mode_" << k;
    modes_csv << ",residual\n";
    for (std::size_t i = 0; i < filled.series.size(); ++i) {
        modes_csv << std::llround(filled.series.timestamp_ms(i));
        for (const auto& mode : result.modes) modes_csv << ',' << csv::format_double(mode.values[i]);
        modes_csv << ',' << csv::format_double(result.residual.values[i]) << '\n';
    }

    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["center_freqs_hz"] = result.center_freqs_hz;
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;
    j["final_delta"] = result.final_delta;
    open_out(out_dir / "centers.json") << j.dump(2) << '\n';

    if (!quiet) {
        std::cout << "decomposed " << filled.series.size() << " samples into " << result.modes.size()
                  << " modes; centers_hz =";
        for (double c : result.center_freqs_hz) std::cout << ' ' << csv::format_double(c);
        std::cout << (result.converged ? "" : " (not converged)") << '\n';
    }
    if (strict && !result.converged)
        throw NonConvergedError("decomposition did not converge within " +
                                std::to_string(vmd.max_iters) + " iterations");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// balance-table commands

int cmd_penetration(const fs::path& balance, const fs::path& out_dir, bool quiet) {
    require_file(balance);
    std::vector<std::size_t> rows;
    const auto records = load_balance_csv(balance, &rows);
    fs::create_directories(out_dir);
    auto out = open_out(out_dir / "penetration.csv");
    out << "date,hour,region,penetration_pct\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (!(r.demand_mw > 0.0))
            throw csv::RowError(balance, rows[i], "demand_mw is zero; penetration undefined");
        out << format_date(r.date) << ',' << r.hour << ',' << region_name(r.region) << ','
            << csv::format_double(ibr_penetration(r)) << '\n';
    }
    if (!quiet) std::cout << "penetration for " << records.size() << " region-hours\n";
    return kExitOk;
}

int cmd_netload(const fs::path& balance, const fs::path& out_dir, bool quiet) {
    require_file(balance);
    const auto records = load_balance_csv(balance);
    fs::create_directories(out_dir);
    auto out = open_out(out_dir / "netload.csv");
    out << "date,hour,region,net_load_mw\n";
    for (const auto& r : records)
        out << format_date(r.date) << ',' << r.hour << ',' << region_name(r.region) << ','
            << csv::format_double(net_load(r)) << '\n';
    const auto system = aggregate_system(records);
    for (const auto& r : system)
        out << format_date(r.date) << ',' << r.hour << ",SYSTEM," << csv::format_double(net_load(r)) << '\n';
    if (!quiet) std::cout << "net load for " << records.size() << " rows + " << system.size()
                          << " system hours\n";
    return kExitOk;
}

/// Contiguous hourly runs of (epoch hour, NL) pairs, per the gap-splitting rule.
std::vector<std::vector<std::pair<std::int64_t, double>>> contiguous_runs(
    std::vector<std::pair<std::int64_t, double>> hours) {
    std::sort(hours.begin(), hours.end());
    std::vector<std::vector<std::pair<std::int64_t, double>>> runs;
    for (const auto& h : hours) {
        if (runs.empty() || h.first != runs.back().back().first + 1)
            runs.emplace_back();
        runs.back().push_back(h);
    }
    return runs;
}

int cmd_ramps(const fs::path& balance, const fs::path& out_dir, const std::vector<std::size_t>& horizons,
              double hist_bin_mw, bool quiet) {
    require_file(balance);
    const auto records = load_balance_csv(balance);
    fs::create_directories(out_dir);

    std::map<std::string, std::vector<std::pair<std::int64_t, double>>> by_label;
    for (const auto& r : records)
        by_label[region_name(r.region)].push_back({days_from_civil(r.date) * 24 + r.hour, net_load(r)});
    for (const auto& r : aggregate_system(records))
        by_label["SYSTEM"].push_back({days_from_civil(r.date) * 24 + r.hour, net_load(r)});

    auto out = open_out(out_dir / "ramps.csv");
    out << "region,horizon_h,date,hour,ramp_mw\n";
    std::size_t total = 0;
    for (const auto& [label, hours] : by_label) {
        const auto runs = contiguous_runs(hours);
        for (std::size_t h : horizons) {
            std::vector<double> all_ramps;
            for (const auto& run : runs) {
                if (run.size() <= h) continue;
                std::vector<double> nl(run.size());
                for (std::size_t i = 0; i < run.size(); ++i) nl[i] = run[i].second;
                const auto ramps = net_load_ramps(nl, h);
                for (std::size_t i = 0; i < ramps.size(); ++i) {
                    const Date d = civil_from_days(run[i].first / 24);
                    out << label << ',' << h << ',' << format_date(d) << ',' << run[i].first % 24 << ','
                        << csv::format_double(ramps[i]) << '\n';
                }
                all_ramps.insert(all_ramps.end(), ramps.begin(), ramps.end());
                total += ramps.size();
            }
            if (hist_bin_mw > 0.0 && !all_ramps.empty())
                write_histogram_csv(ramp_histogram(all_ramps, hist_bin_mw),
                                    out_dir / ("ramp_hist_" + label + "_h" + std::to_string(h) + ".csv"));
        }
    }
    if (!quiet) std::cout << "wrote " << total << " ramps for horizons of "
                          << horizons.size() << " lengths\n";
    return kExitOk;
}

int cmd_curtailment(const fs::path& curtailment, const fs::path& out_dir, int h0, int h1, bool quiet) {
    require_file(curtailment);
    if (h0 < 0 || h1 > 24 || h0 >= h1)
        throw std::invalid_argument("curtailment: bad hour range");
    const auto rows = load_curtailment_csv(curtailment);
    fs::create_directories(out_dir);
    const auto breakdown = curtailment_breakdown(rows, h0, h1);
    auto out = open_out(out_dir / "breakdown.csv");
    out << "reason,count,total_mw,percentage\n";
    for (const auto& s : breakdown.reasons)
        out << reason_name(s.reason) << ',' << s.count << ',' << csv::format_double(s.total_mw) << ','
            << csv::format_double(s.percentage) << '\n';
    const auto profile = hourly_curtailment_profile(rows);
    auto hourly = open_out(out_dir / "hourly.csv");
    hourly << "hour,total_mw\n";
    for (int h = 0; h < 24; ++h)
        hourly << h << ',' << csv::format_double(profile[static_cast<std::size_t>(h)]) << '\n';
    if (!quiet) std::cout << breakdown.total_rows << " curtailment rows in [" << h0 << ',' << h1 << ")\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// stats

int cmd_stats(const fs::path& input, const fs::path& out_dir, const std::string& metric, double rate_hz,
              double bin_width, std::size_t max_lag, double min_prominence, bool quiet) {
    require_file(input);
    fs::create_directories(out_dir);
    const TimeSeries series = load_pmu_csv(input, parse_rate(rate_hz));
    if (metric == "std") {
        StatReport rep;
        rep.metric = "std_dev";
        rep.value = std_dev(series);
        rep.window_start_ms = series.start_epoch_ms;
        rep.window_end_ms = static_cast<std::int64_t>(series.timestamp_ms(series.size()));
        rep.source = input.filename().string();
        open_out(out_dir / "std.json") << stat_report_json(rep) << '\n';
        if (!quiet) std::cout << "std_dev = " << csv::format_double(rep.value) << '\n';
    } else if (metric == "hist") {
        const Histogram h = histogram(series, bin_width);
        write_histogram_csv(h, out_dir / "histogram.csv");
        StatReport rep;
        rep.metric = "skewness";
        rep.value = h.skewness;
        rep.window_start_ms = series.start_epoch_ms;
        rep.window_end_ms = static_cast<std::int64_t>(series.timestamp_ms(series.size()));
        rep.source = input.filename().string();
        open_out(out_dir / "skewness.json") << stat_report_json(rep) << '\n';
        if (!quiet) std::cout << h.counts.size() << " bins, skewness = "
                              << csv::format_double(h.skewness) << '\n';
    } else if (metric == "acf") {
        const auto r = acf(series, max_lag);
        auto out = open_out(out_dir / "acf.csv");
        out << "lag,r\n";
        for (std::size_t lag = 0; lag < r.size(); ++lag)
            out << lag << ',' << csv::format_double(r[lag]) << '\n';
        if (!quiet) std::cout << "acf up to lag " << max_lag << '\n';
    } else if (metric == "spectrum") {
        const auto filled = fill_gaps(series);
        if (filled.series.has_gaps())
            throw std::invalid_argument("spectrum: unfillable gaps in input");
        const Spectrum spec = amplitude_spectrum(filled.series);
        write_spectrum_csv(spec, out_dir / "spectrum.csv");
        const auto peaks = find_spectrum_peaks(spec, min_prominence);
        nlohmann::ordered_json j;
        j["schema_version"] = 1;
        j["freq_resolution_hz"] = spec.freq_resolution_hz;
        j["peaks"] = nlohmann::ordered_json::array();
        for (const auto& p : peaks)
            j["peaks"].push_back(
                {{"freq_hz", p.freq_hz}, {"amplitude", p.amplitude}, {"prominence", p.prominence}});
        open_out(out_dir / "peaks.json") << j.dump(2) << '\n';
        if (!quiet) std::cout << peaks.size() << " spectral peaks\n";
    } else {
        throw std::invalid_argument("unknown metric '" + metric + "' (std|hist|acf|spectrum)");
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// critical-week / framework / synth

int cmd_critical_week(const fs::path& balance, const fs::path& out_dir, const std::string& region_token,
                      bool quiet) {
    require_file(balance);
    const auto records = load_balance_csv(balance);
    const auto week = select_critical_week(records, parse_region(region_token));
    fs::create_directories(out_dir);
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["start_date"] = format_date(week.start_date);
    j["end_date"] = format_date(week.end_date);
    j["region"] = region_name(week.region);
    j["mean_penetration_pct"] = week.mean_penetration_pct;
    open_out(out_dir / "critical_week.json") << j.dump(2) << '\n';
    if (!quiet)
        std::cout << "critical week " << format_date(week.start_date) << ".." << format_date(week.end_date)
                  << " mean " << csv::format_double(week.mean_penetration_pct) << "%\n";
    return kExitOk;
}

int cmd_framework(const fs::path& config_path, std::optional<fs::path> out_override,
                  std::optional<std::uint64_t> seed_override, bool quiet) {
    RunConfig cfg = load_run_config(config_path);
    if (out_override) cfg.out_dir = *out_override;
    if (seed_override) cfg.framework.vmd.seed = *seed_override;

    require_file(cfg.balance_csv);
    for (const auto& [site, path] : cfg.pmu_csv) require_file(path);
    if (cfg.inertia_csv) require_file(*cfg.inertia_csv);
    if (cfg.curtailment_csv) require_file(*cfg.curtailment_csv);

    FrameworkInputs inputs;
    try {
        inputs.records = load_balance_csv(cfg.balance_csv);
        if (cfg.inertia_csv) {
            const auto rows = load_inertia_csv(*cfg.inertia_csv);
            merge_inertia(inputs.records, rows);
            inputs.has_inertia = !rows.empty();
        }
        std::size_t curtail_rows = 0;
        if (cfg.curtailment_csv)
            curtail_rows = load_curtailment_csv(*cfg.curtailment_csv).size();
        for (const auto& [site, path] : cfg.pmu_csv) {
            TimeSeries s = load_pmu_csv(path, cfg.pmu_rate);
            if (cfg.decimate_target_hz > 0.0) {
                auto filled = fill_gaps(s, cfg.framework.max_gap_samples);
                s = decimate(filled.series, {parse_rate(cfg.decimate_target_hz), true});
            }
            inputs.pmu.emplace(site, std::move(s));
        }
        if (!quiet)
            std::cout << "[ingest] " << inputs.records.size() << " balance rows, " << inputs.pmu.size()
                      << " PMU series" << (inputs.has_inertia ? ", inertia attached" : ", no inertia")
                      << (curtail_rows ? ", " + std::to_string(curtail_rows) + " curtailment rows" : "")
                      << '\n';
    } catch (const std::exception& e) {
        throw StageError(Stage::Ingest, e.what());
    }

    const FrameworkReport report = evaluate_framework(inputs, cfg.framework);
    write_report(report, cfg.out_dir);
    if (!quiet) {
        for (const auto& st : report.stages) std::cout << '[' << st.stage << "] " << st.summary << '\n';
        for (const auto& w : report.warnings) std::cout << "warning: " << w << '\n';
        std::cout << "report written to " << (cfg.out_dir / "report.json").string() << '\n';
    }
    return kExitOk;
}

int cmd_synth(std::optional<fs::path> scenario_path, const fs::path& out_dir,
              std::optional<std::uint64_t> seed_override, bool quiet) {
    SyntheticScenario scenario =
        scenario_path ? load_scenario(*scenario_path) : SyntheticScenario::defaults();
    if (seed_override) scenario.seed = *seed_override;
    const SyntheticData data = generate_synthetic(scenario);
    write_synthetic_dataset(data, scenario, out_dir);
    if (!quiet)
        std::cout << "synthetic dataset: " << data.records.size() << " balance rows, "
                  << data.curtailment.size() << " curtailment rows, " << data.pmu.size()
                  << " PMU series covering " << format_date(data.critical_week.start_date) << ".."
                  << format_date(data.critical_week.end_date) << " -> " << out_dir.string() << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequency-dynamics analysis toolkit: mode decomposition of PMU frequency streams "
                 "and grid penetration/net-load/curtailment metrics"};
    app.require_subcommand(1);

    bool quiet = false;
    app.add_flag("--quiet", quiet, "suppress progress output");

    // decompose
    auto* dec = app.add_subcommand("decompose", "split a PMU frequency CSV into modes");
    fs::path dec_input, dec_out = "out";
    VmdConfig dec_vmd;
    std::string dec_init = "uniform";
    double dec_rate = 30.0;
    bool dec_strict = false;
    dec->add_option("input", dec_input, "PMU CSV (timestamp_ms,frequency_hz)")->required();
    dec->add_option("--modes", dec_vmd.n_modes, "number of modes");
    dec->add_option("--alpha", dec_vmd.alpha, "bandwidth balancing parameter");
    dec->add_option("--tau", dec_vmd.tau, "multiplier ascent step");
    dec->add_option("--tol", dec_vmd.tol, "convergence tolerance");
    dec->add_option("--max-iters", dec_vmd.max_iters, "iteration cap");
    dec->add_option("--init", dec_init, "center init: uniform|zero|random");
    dec->add_option("--seed", dec_vmd.seed, "seed for random init");
    dec->add_option("--rate", dec_rate, "declared sample rate in Hz");
    dec->add_flag("--strict", dec_strict, "exit 3 when not converged");
    dec->add_option("--out", dec_out, "output directory");

    // penetration / netload / ramps / curtailment
    auto* pen = app.add_subcommand("penetration", "hourly regional IBR penetration");
    fs::path pen_input, pen_out = "out";
    pen->add_option("balance", pen_input, "balance CSV")->required();
    pen->add_option("--out", pen_out, "output directory");

    auto* net = app.add_subcommand("netload", "hourly net load per region and system-wide");
    fs::path net_input, net_out = "out";
    net->add_option("balance", net_input, "balance CSV")->required();
    net->add_option("--out", net_out, "output directory");

    auto* ramps = app.add_subcommand("ramps", "net-load ramps over hourly horizons");
    fs::path ramps_input, ramps_out = "out";
    std::vector<std::size_t> horizons{1, 3, 5, 7, 12};
    double ramps_bin = 0.0;
    ramps->add_option("balance", ramps_input, "balance CSV")->required();
    ramps->add_option("--horizons", horizons, "horizons in hours")->delimiter(',');
    ramps->add_option("--bin-width", ramps_bin, "also emit ramp histograms with this MW bin width");
    ramps->add_option("--out", ramps_out, "output directory");

    auto* cur = app.add_subcommand("curtailment", "curtailment reason breakdown and hourly profile");
    fs::path cur_input, cur_out = "out";
    int cur_h0 = 8, cur_h1 = 11;
    cur->add_option("curtailment", cur_input, "curtailment CSV")->required();
    cur->add_option("--hour-begin", cur_h0, "breakdown window start hour");
    cur->add_option("--hour-end", cur_h1, "breakdown window end hour (exclusive)");
    cur->add_option("--out", cur_out, "output directory");

    // stats
    auto* st = app.add_subcommand("stats", "std/hist/acf/spectrum of a series");
    fs::path st_input, st_out = "out";
    std::string st_metric;
    double st_rate = 30.0, st_bin = 0.001, st_prom = 0.005;
    std::size_t st_lag = 150;
    st->add_option("input", st_input, "PMU CSV")->required();
    st->add_option("--metric", st_metric, "std|hist|acf|spectrum")->required();
    st->add_option("--rate", st_rate, "declared sample rate in Hz");
    st->add_option("--bin-width", st_bin, "histogram bin width");
    st->add_option("--max-lag", st_lag, "ACF maximum lag in samples");
    st->add_option("--min-prominence", st_prom, "spectrum peak prominence threshold");
    st->add_option("--out", st_out, "output directory");

    // critical-week
    auto* cw = app.add_subcommand("critical-week", "highest mean-penetration 7-day window");
    fs::path cw_input, cw_out = "out";
    std::string cw_region = "NE";
    cw->add_option("balance", cw_input, "balance CSV")->required();
    cw->add_option("--region", cw_region, "region (N|NE|S|SE_CW)");
    cw->add_option("--out", cw_out, "output directory");

    // framework
    auto* fw = app.add_subcommand("framework", "full regional evaluation pipeline");
    fs::path fw_config;
    std::optional<fs::path> fw_out;
    std::optional<std::uint64_t> fw_seed;
    fw->add_option("--config", fw_config, "run config file")->required();
    fw->add_option("--out", [&fw_out](const std::vector<std::string>& v) {
        fw_out = v.front();
        return true;
    }, "override config out_dir");
    fw->add_option("--seed", [&fw_seed](const std::vector<std::string>& v) {
        fw_seed = std::stoull(v.front());
        return true;
    }, "override VMD random-init seed");

    // synth
    auto* sy = app.add_subcommand("synth", "generate a consistent synthetic input set");
    std::optional<fs::path> sy_scenario;
    fs::path sy_out = "out";
    std::optional<std::uint64_t> sy_seed;
    sy->add_option("--scenario", [&sy_scenario](const std::vector<std::string>& v) {
        sy_scenario = v.front();
        return true;
    }, "scenario file (defaults used when omitted)");
    sy->add_option("--seed", [&sy_seed](const std::vector<std::string>& v) {
        sy_seed = std::stoull(v.front());
        return true;
    }, "override scenario seed");
    sy->add_option("--out", sy_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (app.got_subcommand(dec))
            return cmd_decompose(dec_input, dec_out, [&] {
                VmdConfig v = dec_vmd;
                v.init = parse_init(dec_init);
                return v;
            }(), dec_rate, dec_strict, quiet);
        if (app.got_subcommand(pen)) return cmd_penetration(pen_input, pen_out, quiet);
        if (app.got_subcommand(net)) return cmd_netload(net_input, net_out, quiet);
        if (app.got_subcommand(ramps)) return cmd_ramps(ramps_input, ramps_out, horizons, ramps_bin, quiet);
        if (app.got_subcommand(cur)) return cmd_curtailment(cur_input, cur_out, cur_h0, cur_h1, quiet);
        if (app.got_subcommand(st))
            return cmd_stats(st_input, st_out, st_metric, st_rate, st_bin, st_lag, st_prom, quiet);
        if (app.got_subcommand(cw)) return cmd_critical_week(cw_input, cw_out, cw_region, quiet);
        if (app.got_subcommand(fw)) return cmd_framework(fw_config, fw_out, fw_seed, quiet);
        if (app.got_subcommand(sy)) return cmd_synth(sy_scenario, sy_out, sy_seed, quiet);
    } catch (const NonConvergedError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNonConverged;
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.stage()) {
            case Stage::Ingest: return kExitIngest;
            case Stage::Vmd: return kExitVmd;
            case Stage::Stats: return kExitStats;
        }
        return kExitIngest;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}

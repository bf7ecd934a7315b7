#include "flowrisk/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>

#include <json.hpp>

#include "flowrisk/csv.hpp"
#include "flowrisk/mobility.hpp"
#include "flowrisk/risk.hpp"
#include "flowrisk/stats.hpp"
#include "flowrisk/synth.hpp"

namespace flowrisk {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string opt_num(const std::optional<double>& v) {
    return v ? csv::format_double(*v) : std::string();
}

/// Writes to "<final>.tmp" and renames on commit, so a crash mid-write
/// never leaves a truncated output behind.
class StagedCsv {
public:
    explicit StagedCsv(const fs::path& final_path)
        : final_(final_path), tmp_(final_path.string() + ".tmp"), writer_(tmp_.string()) {}

    csv::Writer& out() { return writer_; }

    void commit() {
        writer_.close();
        fs::rename(tmp_, final_);
    }

private:
    fs::path final_;
    fs::path tmp_;
    csv::Writer writer_;
};

void write_text_file(const fs::path& path, const std::string& contents) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << contents;
    }
    fs::rename(tmp, path);
}

struct LoadedInputs {
    AnalysisCalendar calendar;
    std::optional<TripPanel> panel;
    std::optional<CaseSeries> cases;
    std::optional<DemographicsTable> demo;
    ValidationReport report;
};

LoadedInputs load_inputs(const RunConfig& cfg) {
    LoadedInputs in{cfg.make_calendar(), std::nullopt, std::nullopt, std::nullopt, {}};
    const std::vector<std::string> trip_files = expand_trip_paths(cfg.trips_paths);
    in.panel = load_trips(trip_files, in.calendar, in.report);
    in.cases = load_cases(cfg.cases_path, in.report);
    in.demo = load_demographics(cfg.demographics_path, in.report);
    if (in.panel && in.cases && in.demo)
        cross_validate(*in.panel, *in.cases, *in.demo, in.report);
    return in;
}

json report_to_json(const ValidationReport& report) {
    json counts = json::object();
    for (const auto& [name, c] : report.counts)
        counts[name] = {{"read", c.read}, {"accepted", c.accepted}, {"rejected", c.rejected}};
    json issues = json::array();
    for (const ValidationIssue& i : report.issues)
        issues.push_back({{"severity", i.severity == Severity::fatal ? "fatal" : "warning"},
                          {"code", i.code},
                          {"message", i.message},
                          {"location", i.location}});
    return {{"fatal", report.has_fatal()}, {"counts", counts}, {"issues", issues}};
}

void write_validation_json(const fs::path& dir, const ValidationReport& report) {
    write_text_file(dir / "validation.json", report_to_json(report).dump(2) + "\n");
}

/// Default percent-change weeks: national emergency week, trough week, most
/// recent week — unless the config pins its own list.
std::vector<Date> pct_change_weeks(const RunConfig& cfg, const DailySeries& national) {
    std::vector<Date> mondays;
    if (!cfg.weeks.empty()) {
        for (Date w : cfg.weeks) mondays.push_back(w.week_start());
    } else {
        mondays.push_back(cfg.stage_cuts[0].week_start());
        if (!national.values.empty()) {
            std::size_t trough = 0;
            for (std::size_t i = 1; i < national.values.size(); ++i)
                if (national.values[i] < national.values[trough]) trough = i;
            mondays.push_back(national.dates[trough].week_start());
            mondays.push_back(national.dates.back().week_start());
        }
    }
    std::vector<Date> unique;
    for (Date m : mondays)
        if (std::find(unique.begin(), unique.end(), m) == unique.end()) unique.push_back(m);
    return unique;
}

void emit_analyze_outputs(const RunConfig& cfg, const LoadedInputs& in, const fs::path& dir) {
    const TripPanel& panel = *in.panel;
    const StagePartition partition = cfg.make_partition();
    const RegionSpec region = cfg.region();

    const DailySeries national = national_inflow_series(panel);
    const DailySeries ma3 = moving_average(national, 3);
    {
        StagedCsv f(dir / "trend.csv");
        f.out().raw_line("date,total,ma3");
        for (std::size_t i = 0; i < national.dates.size(); ++i)
            f.out().row({national.dates[i].to_string(), csv::format_double(national.values[i]),
                         csv::format_double(ma3.values[i])});
        f.commit();
    }
    {
        StagedCsv f(dir / "stages.csv");
        f.out().raw_line("date,stage");
        for (Date d : panel.calendar().days())
            f.out().row({d.to_string(), std::string(to_string(partition.stage_of(d)))});
        f.commit();
    }

    const BaselineTable baselines = county_baselines(panel, cfg.baseline_start, cfg.baseline_end);
    {
        StagedCsv f(dir / "baseline.csv");
        f.out().raw_line("fips,baseline");
        for (const auto& [county, value] : baselines.entries())
            f.out().row({to_string(county), csv::format_double(value)});
        f.commit();
    }

    const std::vector<Date> weeks = pct_change_weeks(cfg, national);
    {
        StagedCsv summary(dir / "weekly_summary.csv");
        summary.out().raw_line("week,share_with_increase,n_defined,n_undefined");
        for (Date monday : weeks) {
            const WeeklyChange change = weekly_pct_change(panel, monday, baselines);
            StagedCsv f(dir / ("pct_change_" + monday.to_string() + ".csv"));
            f.out().raw_line("fips,pct");
            std::size_t defined = 0;
            for (const auto& [county, pct] : change.pct) {
                f.out().row({to_string(county), opt_num(pct)});
                if (pct) ++defined;
            }
            f.commit();
            summary.out().row({monday.to_string(), csv::format_double(share_with_increase(change)),
                               csv::format_int(static_cast<long long>(defined)),
                               csv::format_int(static_cast<long long>(change.pct.size() - defined))});
        }
        summary.commit();
    }

    {
        StagedCsv f(dir / "region_daily.csv");
        f.out().raw_line(
            "date,inflow,outflow,n_origins,n_destinations,rank_inflow,rank_outflow,rank_norigins,"
            "rank_ndest");
        for (Date d : panel.calendar().days()) {
            const RegionFlowMetrics m = region_flow_metrics(panel, region, d);
            f.out().row({d.to_string(), csv::format_double(m.inflow), csv::format_double(m.outflow),
                         csv::format_int(m.n_origins), csv::format_int(m.n_destinations),
                         csv::format_int(region_rank(panel, region, RegionMetric::inflow, d)),
                         csv::format_int(region_rank(panel, region, RegionMetric::outflow, d)),
                         csv::format_int(region_rank(panel, region, RegionMetric::n_origins, d)),
                         csv::format_int(region_rank(panel, region, RegionMetric::n_destinations, d))});
        }
        f.commit();
    }

    {
        const auto top = top_destinations(panel, region, panel.calendar().start(),
                                          panel.calendar().end(), cfg.top_k);
        StagedCsv f(dir / "top_destinations.csv");
        f.out().raw_line("rank,fips,trips");
        for (std::size_t i = 0; i < top.size(); ++i)
            f.out().row({csv::format_int(static_cast<long long>(i + 1)), to_string(top[i].first),
                         csv::format_double(top[i].second)});
        f.commit();
    }

    {
        StagedCsv f(dir / "destination_spread.csv");
        f.out().raw_line("window_start,window_end,mean_daily_destinations,fraction");
        auto emit_window = [&](Date ws, Date we) {
            const SpreadResult r = destination_spread(panel, region, ws, we, cfg.total_county_count);
            f.out().row({ws.to_string(), we.to_string(),
                         csv::format_double(r.mean_daily_destinations),
                         csv::format_double(r.fraction_of_counties)});
        };
        emit_window(cfg.baseline_start, cfg.baseline_end);
        for (Date monday : weeks) emit_window(monday, monday + 6);
        f.commit();
    }
}

void emit_correlation_outputs(const RunConfig& cfg, const LoadedInputs& in, const fs::path& dir) {
    const TripPanel& panel = *in.panel;
    const RegionSpec region = cfg.region();
    Date case_start = cfg.correlation_dates ? cfg.correlation_dates->first : cfg.stage_cuts[0];
    Date case_end = cfg.correlation_dates ? cfg.correlation_dates->second : cfg.calendar_end;
    std::vector<Date> case_dates;
    for (Date d : panel.calendar().days())
        if (d >= case_start && d <= case_end) case_dates.push_back(d);

    for (int weeks : cfg.lag_weeks) {
        const auto points = lagged_correlation_series(panel, *in.cases, *in.demo, region,
                                                      LagSpec{weeks}, case_dates, cfg.correlation_sample);
        StagedCsv f(dir / ("correlations_lag" + std::to_string(weeks) + ".csv"));
        f.out().raw_line("case_date,pearson,spearman,n,defined");
        std::vector<double> defined_p, defined_s;
        for (const CorrelationPoint& pt : points) {
            const bool defined = pt.pearson.has_value() && pt.spearman.has_value();
            f.out().row({pt.case_date.to_string(), opt_num(pt.pearson), opt_num(pt.spearman),
                         csv::format_int(pt.n), defined ? "true" : "false"});
            if (pt.pearson) defined_p.push_back(*pt.pearson);
            if (pt.spearman) defined_s.push_back(*pt.spearman);
        }
        auto stat_row = [&](const std::string& name, double (*fn)(std::vector<double>&)) {
            std::string p = defined_p.empty() ? std::string() : csv::format_double(fn(defined_p));
            std::string s = defined_s.empty() ? std::string() : csv::format_double(fn(defined_s));
            f.out().row({name, p, s, csv::format_int(static_cast<long long>(defined_p.size())),
                         "summary"});
        };
        stat_row("max", [](std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); });
        stat_row("mean", [](std::vector<double>& v) {
            double sum = 0;
            for (double x : v) sum += x;
            return sum / static_cast<double>(v.size());
        });
        stat_row("median", [](std::vector<double>& v) {
            std::sort(v.begin(), v.end());
            const std::size_t n = v.size();
            return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
        });
        f.commit();
    }
}

std::vector<std::pair<std::string, std::pair<Date, Date>>> period_table(const RunConfig& cfg) {
    const StagePartition partition = cfg.make_partition();
    std::vector<std::pair<std::string, std::pair<Date, Date>>> out;
    for (Period p : cfg.periods)
        out.emplace_back(std::string(to_string(p)), period_range(partition, p));
    return out;
}

json emit_fit_outputs(const RunConfig& cfg, const LoadedInputs& in, const fs::path& dir) {
    const auto periods = period_table(cfg);
    const auto cells = scenario_grid(*in.panel, *in.cases, *in.demo, periods, cfg.lag_weeks,
                                     cfg.er_weighting);
    json cell_exclusions = json::array();
    {
        StagedCsv f(dir / "fits.csv");
        f.out().raw_line("period,lag_weeks,alpha,beta_age,beta_male,beta_afri,beta_inc,gamma,r2,n,"
                         "n_excluded");
        for (const ScenarioCell& cell : cells) {
            if (cell.fit) {
                const DoubleRiskFit& fit = *cell.fit;
                f.out().row({cell.period_label, csv::format_int(cell.lag_weeks),
                             csv::format_double(fit.alpha), csv::format_double(fit.beta[0]),
                             csv::format_double(fit.beta[1]), csv::format_double(fit.beta[2]),
                             csv::format_double(fit.beta[3]), csv::format_double(fit.gamma),
                             csv::format_double(fit.r_squared), csv::format_int(fit.n),
                             csv::format_int(fit.n_excluded)});
            } else {
                // flagged, not silently absent: numeric fields stay empty
                f.out().row({cell.period_label, csv::format_int(cell.lag_weeks), "", "", "", "", "",
                             "", "", "0", csv::format_int(cell.n_excluded)});
            }
            cell_exclusions.push_back({{"period", cell.period_label},
                                       {"lag_weeks", cell.lag_weeks},
                                       {"n_excluded", cell.n_excluded},
                                       {"failure", cell.failure}});
        }
        f.commit();
    }

    // importance (after-pandemic periods only) and the per-scenario design
    // dumps share one design build per cell
    {
        StagedCsv f(dir / "importance.csv");
        f.out().raw_line("period,lag_weeks,r2_full,r2_ir_only,delta");
        for (const auto& [label, range] : periods) {
            const bool in_importance = label != to_string(Period::pre_pandemic);
            for (int weeks : cfg.lag_weeks) {
                std::optional<DesignMatrix> design;
                try {
                    design.emplace(build_design(*in.panel, *in.cases, *in.demo, range.first,
                                                range.second, LagSpec{weeks}, cfg.er_weighting,
                                                label));
                } catch (const std::exception&) {
                    // cell already flagged in fits.csv
                }
                if (in_importance) {
                    bool wrote = false;
                    if (design) {
                        try {
                            const ImportanceResult imp = er_importance(*design);
                            f.out().row({label, csv::format_int(weeks),
                                         csv::format_double(imp.r2_full),
                                         csv::format_double(imp.r2_ir_only),
                                         csv::format_double(imp.delta)});
                            wrote = true;
                        } catch (const std::exception&) {
                        }
                    }
                    if (!wrote) f.out().row({label, csv::format_int(weeks), "", "", ""});
                }
                if (!design) continue;
                const std::string scenario = label + "_lag" + std::to_string(weeks);
                StagedCsv fd(dir / ("design_" + scenario + ".csv"));
                fd.out().raw_line(
                    "fips,log10_er,age65,male,african_american,income_std,log10_severity");
                for (const DesignRow& row : design->rows)
                    fd.out().row({to_string(row.county), csv::format_double(row.log10_er),
                                  csv::format_double(row.age65), csv::format_double(row.male),
                                  csv::format_double(row.african_american),
                                  csv::format_double(row.income_std),
                                  csv::format_double(row.log10_severity)});
                fd.commit();
                StagedCsv fe(dir / ("design_" + scenario + "_exclusions.csv"));
                fe.out().raw_line("fips,reason");
                for (const auto& [county, reason] : design->exclusions)
                    fe.out().row({to_string(county), std::string(to_string(reason))});
                fe.commit();
            }
        }
        f.commit();
    }

    // period-level external risk and lagged severity for every candidate
    // county (plot-ready risk surfaces)
    {
        std::set<CountyId> candidate_set;
        for (const DemographicsRecord& r : in.demo->records()) candidate_set.insert(r.county);
        for (CountyId c : in.panel->counties()) candidate_set.insert(c);
        std::vector<CountyId> with_demo;
        for (CountyId c : candidate_set)
            if (in.demo->contains(c)) with_demo.push_back(c);

        StagedCsv fr(dir / "external_risk.csv");
        fr.out().raw_line("fips,window_start,window_end,er,n_origins");
        StagedCsv fsev(dir / "severity.csv");
        fsev.out().raw_line("fips,anchor,lag_weeks,severity,available");
        for (const auto& [label, range] : periods) {
            (void)label;
            const auto ers = external_risk_grid(*in.panel, *in.cases, *in.demo, with_demo,
                                                range.first, range.second, cfg.er_weighting);
            for (const ExternalRisk& er : ers)
                fr.out().row({to_string(er.county), er.window_start.to_string(),
                              er.window_end.to_string(), csv::format_double(er.er),
                              csv::format_int(er.n_origins)});
            for (int weeks : cfg.lag_weeks) {
                for (CountyId c : with_demo) {
                    const SeveritySample s =
                        severity(*in.cases, *in.demo, c, range.second, LagSpec{weeks});
                    fsev.out().row({to_string(c), s.anchor.to_string(), csv::format_int(weeks),
                                    s.available ? csv::format_double(s.severity) : std::string(),
                                    s.available ? "true" : "false"});
                }
            }
        }
        fr.commit();
        fsev.commit();
    }

    return cell_exclusions;
}

struct SynthArtifacts {
    SyntheticWorld world;
    TripPanel panel;
    CaseSeries cases;
};

SynthArtifacts build_synth_world(const RunConfig& cfg) {
    const SynthConfig& sc = cfg.synth;
    if (sc.n_counties < 2) throw std::invalid_argument("synth.n_counties must be >= 2");
    if (sc.mode != "epidemic" && sc.mode != "loglinear")
        throw std::invalid_argument("synth.mode must be epidemic or loglinear");
    const AnalysisCalendar calendar = cfg.make_calendar();
    const StagePartition partition = cfg.make_partition();

    GravityParams gravity = sc.gravity;
    for (const auto& [stage, mult] : sc.stage_multipliers) {
        if (mult <= 0) throw std::invalid_argument("stage multiplier must be positive");
        bool known = false;
        for (Date d : calendar.days()) {
            if (to_string(partition.stage_of(d)) == stage) {
                gravity.daily_multipliers[d] = mult;
                known = true;
            }
        }
        if (!known) throw std::invalid_argument("unknown stage in stage_multipliers: " + stage);
    }

    SyntheticWorld world = SyntheticWorld::make(sc.n_counties, sc.seed, gravity, sc.epi);
    TripPanel panel = gravity_flows(world, calendar);
    CaseSeries cases;
    if (sc.mode == "epidemic") {
        cases = simulate_epidemic(world, panel, calendar);
    } else {
        auto period = parse_period(sc.loglinear_period);
        if (!period) throw std::invalid_argument("unknown synth.loglinear.period");
        const auto range = period_range(partition, *period);
        cases = generate_loglinear(world, panel, range.first, range.second,
                                   LagSpec{sc.loglinear_lag_weeks}, sc.alpha, sc.beta, sc.gamma,
                                   sc.noise_sigma);
    }
    return {std::move(world), std::move(panel), std::move(cases)};
}

json synth_params_echo(const SynthConfig& sc) {
    return {{"n_counties", sc.n_counties},
            {"seed", sc.seed},
            {"mode", sc.mode},
            {"gravity",
             {{"k", sc.gravity.k},
              {"pop_exponent_origin", sc.gravity.pop_exponent_origin},
              {"pop_exponent_dest", sc.gravity.pop_exponent_dest},
              {"distance_exponent", sc.gravity.distance_exponent}}},
            {"stage_multipliers", sc.stage_multipliers},
            {"epi",
             {{"beta_internal", sc.epi.beta_internal},
              {"import_coefficient", sc.epi.import_coefficient},
              {"recovery_rate", sc.epi.recovery_rate},
              {"seed_county", sc.epi.seed_county.fips == 0 ? "" : to_string(sc.epi.seed_county)},
              {"seed_cases", sc.epi.seed_cases},
              {"reporting_fraction", sc.epi.reporting_fraction}}},
            {"loglinear",
             {{"period", sc.loglinear_period},
              {"lag_weeks", sc.loglinear_lag_weeks},
              {"alpha", sc.alpha},
              {"beta", sc.beta},
              {"gamma", sc.gamma},
              {"sigma", sc.noise_sigma}}}};
}

int guarded(const char* command, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << command << ": configuration error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << command << ": error: " << e.what() << "\n";
        return kExitComputeError;
    }
}

}  // namespace

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot digest missing file: " + path);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
    return std::string("fnv1a64:") + hex;
}

int cmd_validate(const RunConfig& cfg) {
    return guarded("validate", [&] {
        fs::create_directories(cfg.output_dir);
        const LoadedInputs in = load_inputs(cfg);
        write_validation_json(cfg.output_dir, in.report);
        return in.report.has_fatal() ? kExitValidationFatal : kExitOk;
    });
}

int cmd_analyze(const RunConfig& cfg) {
    return guarded("analyze", [&] {
        fs::create_directories(cfg.output_dir);
        const LoadedInputs in = load_inputs(cfg);
        if (in.report.has_fatal()) {
            write_validation_json(cfg.output_dir, in.report);
            return kExitValidationFatal;
        }
        emit_analyze_outputs(cfg, in, cfg.output_dir);
        return kExitOk;
    });
}

int cmd_correlate(const RunConfig& cfg) {
    return guarded("correlate", [&] {
        fs::create_directories(cfg.output_dir);
        const LoadedInputs in = load_inputs(cfg);
        if (in.report.has_fatal()) {
            write_validation_json(cfg.output_dir, in.report);
            return kExitValidationFatal;
        }
        emit_correlation_outputs(cfg, in, cfg.output_dir);
        return kExitOk;
    });
}

int cmd_fit(const RunConfig& cfg) {
    return guarded("fit", [&] {
        fs::create_directories(cfg.output_dir);
        const LoadedInputs in = load_inputs(cfg);
        if (in.report.has_fatal()) {
            write_validation_json(cfg.output_dir, in.report);
            return kExitValidationFatal;
        }
        emit_fit_outputs(cfg, in, cfg.output_dir);
        return kExitOk;
    });
}

int cmd_synth(const RunConfig& cfg) {
    return guarded("synth", [&] {
        // everything is constructed before the first byte is written
        const SynthArtifacts artifacts = build_synth_world(cfg);
        fs::create_directories(cfg.output_dir);
        const fs::path dir(cfg.output_dir);
        write_trips_csv((dir / "trips.csv").string(), artifacts.panel);
        write_cases_csv((dir / "cases.csv").string(), artifacts.cases);
        write_demographics_csv((dir / "demographics.csv").string(), artifacts.world.demographics());
        {
            StagedCsv f(dir / "counties.csv");
            f.out().raw_line("fips,population,cx,cy");
            for (const SyntheticCounty& c : artifacts.world.counties)
                f.out().row({to_string(c.id), csv::format_int(c.population),
                             csv::format_double(c.cx), csv::format_double(c.cy)});
            f.commit();
        }
        write_text_file(dir / "synth_params.json", synth_params_echo(cfg.synth).dump(2) + "\n");
        return kExitOk;
    });
}

int cmd_report(const RunConfig& cfg) {
    return guarded("report", [&] {
        const fs::path final_dir(cfg.output_dir);
        const fs::path staging(cfg.output_dir + ".partial");
        fs::remove_all(staging);
        fs::create_directories(staging);

        using clock = std::chrono::steady_clock;
        json timings = json::object();
        auto timed = [&](const char* name, const std::function<void()>& step) {
            const auto t0 = clock::now();
            step();
            timings[name] =
                std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - t0).count();
        };

        std::optional<LoadedInputs> in;
        timed("load", [&] { in.emplace(load_inputs(cfg)); });
        write_validation_json(staging, in->report);

        json exclusions = json::object();
        exclusions["validation_warnings"] = static_cast<int>(in->report.issues.size());
        for (const auto& [name, c] : in->report.counts)
            exclusions[name + "_rejected"] = c.rejected;

        int status = kExitOk;
        if (in->report.has_fatal()) {
            status = kExitValidationFatal;
        } else {
            timed("analyze", [&] { emit_analyze_outputs(cfg, *in, staging); });
            timed("correlate", [&] { emit_correlation_outputs(cfg, *in, staging); });
            timed("fit", [&] { exclusions["fit_cells"] = emit_fit_outputs(cfg, *in, staging); });
        }

        json manifest;
        manifest["tool"] = {{"name", "flowrisk"}, {"version", "0.1.0"}};
        manifest["config"] = cfg.config_json.empty() ? json::object() : json::parse(cfg.config_json);
        json inputs = json::object();
        for (const std::string& p : expand_trip_paths(cfg.trips_paths)) inputs[p] = file_digest(p);
        if (fs::exists(cfg.cases_path)) inputs[cfg.cases_path] = file_digest(cfg.cases_path);
        if (fs::exists(cfg.demographics_path))
            inputs[cfg.demographics_path] = file_digest(cfg.demographics_path);
        manifest["inputs"] = inputs;
        json outputs = json::object();
        std::vector<fs::path> produced;
        for (const auto& e : fs::directory_iterator(staging))
            if (e.is_regular_file()) produced.push_back(e.path());
        std::sort(produced.begin(), produced.end());
        for (const fs::path& p : produced) outputs[p.filename().string()] = file_digest(p.string());
        manifest["outputs"] = outputs;
        manifest["exclusions"] = exclusions;
        manifest["timings_ms"] = timings;
        write_text_file(staging / "manifest.json", manifest.dump(2) + "\n");

        fs::remove_all(final_dir);
        fs::rename(staging, final_dir);
        return status;
    });
}

}  // namespace flowrisk

#include "flowrisk/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace flowrisk {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Date parse_date_field(const json& j, const std::string& what) {
    if (!j.is_string()) throw ConfigError(what + " must be an ISO date string");
    try {
        return Date::parse(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(what + ": " + e.what());
    }
}

std::vector<CountyId> parse_fips_list(const json& j, const std::string& what) {
    if (!j.is_array()) throw ConfigError(what + " must be an array of FIPS codes");
    std::vector<CountyId> out;
    for (const auto& item : j) {
        try {
            if (item.is_string())
                out.push_back(parse_fips(item.get<std::string>()));
            else if (item.is_number_unsigned() || item.is_number_integer())
                out.push_back(parse_fips(std::to_string(item.get<long long>())));
            else
                throw std::invalid_argument("not a FIPS code");
        } catch (const std::invalid_argument& e) {
            throw ConfigError(what + ": " + e.what());
        }
    }
    return out;
}

bool wildcard_match(std::string_view pattern, std::string_view name) {
    // '*' only; greedy segment matching
    std::size_t p = 0, s = 0, star = std::string_view::npos, mark = 0;
    while (s < name.size()) {
        if (p < pattern.size() && (pattern[p] == name[s])) {
            ++p;
            ++s;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = s;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            s = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

}  // namespace

std::vector<std::string> expand_trip_paths(const std::vector<std::string>& entries) {
    std::vector<std::string> out;
    for (const std::string& entry : entries) {
        if (entry.find('*') == std::string::npos) {
            out.push_back(entry);
            continue;
        }
        const fs::path p(entry);
        const fs::path dir = p.parent_path().empty() ? fs::path(".") : p.parent_path();
        const std::string pattern = p.filename().string();
        std::vector<std::string> matched;
        std::error_code ec;
        for (const auto& e : fs::directory_iterator(dir, ec))
            if (e.is_regular_file() && wildcard_match(pattern, e.path().filename().string()))
                matched.push_back(e.path().string());
        if (ec) throw ConfigError("cannot list directory for pattern: " + entry);
        if (matched.empty()) throw ConfigError("trip pattern matched no files: " + entry);
        std::sort(matched.begin(), matched.end());
        out.insert(out.end(), matched.begin(), matched.end());
    }
    return out;
}

AnalysisCalendar RunConfig::make_calendar() const {
    return AnalysisCalendar(calendar_start, calendar_end,
                            std::set<Date>(holidays.begin(), holidays.end()));
}

StagePartition RunConfig::make_partition() const {
    return make_stage_partition(calendar_start, calendar_end, stage_cuts[0], stage_cuts[1],
                                stage_cuts[2]);
}

RegionSpec RunConfig::region() const {
    auto it = regions.find(analysis_region);
    if (it == regions.end())
        throw ConfigError("analysis_region '" + analysis_region + "' not defined under regions");
    return RegionSpec(it->first, it->second);
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();

    json j;
    try {
        j = json::parse(buffer.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("config is not valid JSON: " + std::string(e.what()));
    }

    RunConfig cfg;
    cfg.config_json = buffer.str();
    // US federal holidays inside the default study window
    cfg.holidays = {Date::from_ymd(2020, 1, 1), Date::from_ymd(2020, 1, 20),
                    Date::from_ymd(2020, 2, 17)};
    cfg.regions["nyc"] = {CountyId{36061}, CountyId{36005}, CountyId{36081}, CountyId{36047},
                          CountyId{36085}};

    if (j.contains("paths")) {
        const json& p = j["paths"];
        if (p.contains("trips")) {
            if (p["trips"].is_string())
                cfg.trips_paths = {p["trips"].get<std::string>()};
            else if (p["trips"].is_array())
                cfg.trips_paths = p["trips"].get<std::vector<std::string>>();
            else
                throw ConfigError("paths.trips must be a string or array");
        }
        if (p.contains("cases")) cfg.cases_path = p["cases"].get<std::string>();
        if (p.contains("demographics")) cfg.demographics_path = p["demographics"].get<std::string>();
        if (p.contains("output")) cfg.output_dir = p["output"].get<std::string>();
    }
    if (j.contains("calendar")) {
        const json& c = j["calendar"];
        if (c.contains("start")) cfg.calendar_start = parse_date_field(c["start"], "calendar.start");
        if (c.contains("end")) cfg.calendar_end = parse_date_field(c["end"], "calendar.end");
        if (c.contains("holidays")) {
            cfg.holidays.clear();
            for (const auto& h : c["holidays"])
                cfg.holidays.push_back(parse_date_field(h, "calendar.holidays"));
        }
    }
    if (j.contains("stages")) {
        const json& s = j["stages"];
        if (s.contains("cuts")) {
            if (!s["cuts"].is_array() || s["cuts"].size() != 3)
                throw ConfigError("stages.cuts must list exactly 3 dates");
            for (int i = 0; i < 3; ++i)
                cfg.stage_cuts[static_cast<std::size_t>(i)] =
                    parse_date_field(s["cuts"][static_cast<std::size_t>(i)], "stages.cuts");
        }
    }
    if (j.contains("regions")) {
        cfg.regions.clear();
        for (const auto& [name, members] : j["regions"].items())
            cfg.regions[name] = parse_fips_list(members, "regions." + name);
    }
    if (j.contains("analysis_region")) cfg.analysis_region = j["analysis_region"].get<std::string>();
    if (j.contains("baseline_window")) {
        const json& b = j["baseline_window"];
        if (b.contains("start")) cfg.baseline_start = parse_date_field(b["start"], "baseline.start");
        if (b.contains("end")) cfg.baseline_end = parse_date_field(b["end"], "baseline.end");
    }
    if (j.contains("total_county_count")) cfg.total_county_count = j["total_county_count"].get<int>();
    if (j.contains("lags")) cfg.lag_weeks = j["lags"].get<std::vector<int>>();
    if (j.contains("periods")) {
        cfg.periods.clear();
        for (const auto& p : j["periods"]) {
            auto parsed = parse_period(p.get<std::string>());
            if (!parsed) throw ConfigError("unknown period: " + p.get<std::string>());
            cfg.periods.push_back(*parsed);
        }
    }
    if (j.contains("weeks"))
        for (const auto& w : j["weeks"]) cfg.weeks.push_back(parse_date_field(w, "weeks"));
    if (j.contains("top_k")) cfg.top_k = j["top_k"].get<int>();
    if (j.contains("correlation_dates")) {
        const json& c = j["correlation_dates"];
        cfg.correlation_dates = {parse_date_field(c.at("start"), "correlation_dates.start"),
                                 parse_date_field(c.at("end"), "correlation_dates.end")};
    }
    if (j.contains("correlation_sample")) {
        const std::string s = j["correlation_sample"].get<std::string>();
        if (s == "fixed_set_zero_fill")
            cfg.correlation_sample = SamplePolicy::fixed_set_zero_fill;
        else if (s == "positive_flow_only")
            cfg.correlation_sample = SamplePolicy::positive_flow_only;
        else
            throw ConfigError("correlation_sample must be fixed_set_zero_fill or positive_flow_only");
    }
    if (j.contains("er_weighting")) {
        const std::string s = j["er_weighting"].get<std::string>();
        if (s == "daily_synchronous")
            cfg.er_weighting = ErWeighting::daily_synchronous;
        else if (s == "period_end")
            cfg.er_weighting = ErWeighting::period_end;
        else
            throw ConfigError("er_weighting must be daily_synchronous or period_end");
    }
    if (j.contains("synth")) {
        const json& s = j["synth"];
        SynthConfig& sc = cfg.synth;
        if (s.contains("n_counties")) sc.n_counties = s["n_counties"].get<int>();
        if (s.contains("seed")) sc.seed = s["seed"].get<std::uint64_t>();
        if (s.contains("mode")) sc.mode = s["mode"].get<std::string>();
        if (s.contains("gravity")) {
            const json& g = s["gravity"];
            if (g.contains("k")) sc.gravity.k = g["k"].get<double>();
            if (g.contains("pop_exponent_origin"))
                sc.gravity.pop_exponent_origin = g["pop_exponent_origin"].get<double>();
            if (g.contains("pop_exponent_dest"))
                sc.gravity.pop_exponent_dest = g["pop_exponent_dest"].get<double>();
            if (g.contains("distance_exponent"))
                sc.gravity.distance_exponent = g["distance_exponent"].get<double>();
        }
        if (s.contains("stage_multipliers"))
            for (const auto& [stage, mult] : s["stage_multipliers"].items())
                sc.stage_multipliers[stage] = mult.get<double>();
        if (s.contains("epi")) {
            const json& e = s["epi"];
            if (e.contains("beta_internal")) sc.epi.beta_internal = e["beta_internal"].get<double>();
            if (e.contains("import_coefficient"))
                sc.epi.import_coefficient = e["import_coefficient"].get<double>();
            if (e.contains("recovery_rate")) sc.epi.recovery_rate = e["recovery_rate"].get<double>();
            if (e.contains("seed_county"))
                sc.epi.seed_county = parse_fips(e["seed_county"].get<std::string>());
            if (e.contains("seed_cases")) sc.epi.seed_cases = e["seed_cases"].get<int>();
            if (e.contains("reporting_fraction"))
                sc.epi.reporting_fraction = e["reporting_fraction"].get<double>();
        }
        if (s.contains("loglinear")) {
            const json& l = s["loglinear"];
            if (l.contains("period")) sc.loglinear_period = l["period"].get<std::string>();
            if (l.contains("lag_weeks")) sc.loglinear_lag_weeks = l["lag_weeks"].get<int>();
            if (l.contains("alpha")) sc.alpha = l["alpha"].get<double>();
            if (l.contains("beta")) {
                if (!l["beta"].is_array() || l["beta"].size() != 4)
                    throw ConfigError("synth.loglinear.beta must list 4 values");
                for (int i = 0; i < 4; ++i)
                    sc.beta[static_cast<std::size_t>(i)] =
                        l["beta"][static_cast<std::size_t>(i)].get<double>();
            }
            if (l.contains("gamma")) sc.gamma = l["gamma"].get<double>();
            if (l.contains("sigma")) sc.noise_sigma = l["sigma"].get<double>();
        }
    }

    // input paths resolve relative to the config file; the output directory
    // stays relative to the working directory (and --out overrides it)
    const fs::path config_dir = fs::path(path).parent_path();
    auto resolve = [&](std::string& p) {
        if (!p.empty() && !fs::path(p).is_absolute()) p = (config_dir / p).string();
    };
    for (std::string& p : cfg.trips_paths) resolve(p);
    resolve(cfg.cases_path);
    resolve(cfg.demographics_path);

    // invariants
    if (cfg.calendar_start > cfg.calendar_end) throw ConfigError("calendar start after end");
    {
        std::set<std::string> distinct;
        for (const std::string& p : cfg.trips_paths) distinct.insert(p);
        if (!cfg.cases_path.empty() && !distinct.insert(cfg.cases_path).second)
            throw ConfigError("cases path duplicates a trips path");
        if (!cfg.demographics_path.empty() && !distinct.insert(cfg.demographics_path).second)
            throw ConfigError("demographics path duplicates another input path");
        if (distinct.size() != cfg.trips_paths.size() + (cfg.cases_path.empty() ? 0 : 1) +
                                   (cfg.demographics_path.empty() ? 0 : 1))
            throw ConfigError("input paths must be distinct");
    }
    Date prev = cfg.calendar_start - 1;
    for (Date cut : cfg.stage_cuts) {
        if (cut < cfg.calendar_start || cut > cfg.calendar_end)
            throw ConfigError("stage cut " + cut.to_string() + " outside the calendar");
        if (cut <= prev) throw ConfigError("stage cuts must be strictly increasing");
        prev = cut;
    }
    for (int w : cfg.lag_weeks)
        if (w < 0 || w > 3) throw ConfigError("lags must lie in {0,1,2,3}");
    if (cfg.top_k < 1) throw ConfigError("top_k must be >= 1");
    if (cfg.total_county_count < 1) throw ConfigError("total_county_count must be >= 1");
    return cfg;
}

}  // namespace flowrisk

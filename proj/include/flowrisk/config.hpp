#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowrisk/calendar.hpp"
#include "flowrisk/stats.hpp"
#include "flowrisk/synth.hpp"

namespace flowrisk {

/// Configuration problems exit with status 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Generator settings for the `synth` subcommand.
struct SynthConfig {
    int n_counties = 50;
    std::uint64_t seed = 1;
    std::string mode = "epidemic";  // epidemic | loglinear
    GravityParams gravity;
    /// Per-stage flow multipliers applied to every day of that stage,
    /// mimicking the four-stage national trend.
    std::map<std::string, double> stage_multipliers;
    EpiParams epi;
    // log-linear construction truth
    std::string loglinear_period = "all_after_pandemic";
    int loglinear_lag_weeks = 1;
    double alpha = 0.8;
    std::array<double, 4> beta{0.01, -0.02, 0.015, 0.1};
    double gamma = -1.0;
    double noise_sigma = 0.1;
};

/// One self-describing run configuration (JSON file); command-line flags
/// only override entries.
struct RunConfig {
    // paths
    std::vector<std::string> trips_paths;  // literal paths or * patterns
    std::string cases_path;
    std::string demographics_path;
    std::string output_dir = "out";

    Date calendar_start = Date::from_ymd(2020, 1, 2);
    Date calendar_end = Date::from_ymd(2020, 5, 15);
    std::vector<Date> holidays;  // defaults to US federal holidays in-window
    std::array<Date, 3> stage_cuts = {Date::from_ymd(2020, 3, 13), Date::from_ymd(2020, 4, 13),
                                      Date::from_ymd(2020, 4, 23)};

    std::map<std::string, std::vector<CountyId>> regions;
    std::string analysis_region = "nyc";

    Date baseline_start = Date::from_ymd(2020, 1, 2);
    Date baseline_end = Date::from_ymd(2020, 1, 31);

    int total_county_count = 3143;
    std::vector<int> lag_weeks{0, 1, 2, 3};
    std::vector<Period> periods = all_periods();
    std::vector<Date> weeks;  // pct-change weeks; empty = derive from data
    int top_k = 12;
    std::optional<std::pair<Date, Date>> correlation_dates;  // default: first cut .. calendar end

    SamplePolicy correlation_sample = SamplePolicy::fixed_set_zero_fill;
    ErWeighting er_weighting = ErWeighting::daily_synchronous;

    SynthConfig synth;
    int jobs = 0;  // 0 = library default

    std::string config_json;  // raw file contents, echoed into the manifest

    AnalysisCalendar make_calendar() const;
    StagePartition make_partition() const;
    RegionSpec region() const;  // the analysis region; throws ConfigError when unknown
};

/// Parses and validates a config file. Throws ConfigError on unreadable
/// files, malformed JSON, or violated invariants (duplicate paths, cuts
/// outside the calendar, lags outside {0,1,2,3}).
RunConfig load_config(const std::string& path);

/// Expands * patterns against the filesystem (sorted); literal entries pass
/// through. Throws ConfigError when a pattern matches nothing.
std::vector<std::string> expand_trip_paths(const std::vector<std::string>& entries);

}  // namespace flowrisk

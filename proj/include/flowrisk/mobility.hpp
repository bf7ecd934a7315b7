#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "flowrisk/calendar.hpp"
#include "flowrisk/ingest.hpp"

namespace flowrisk {

/// A value per calendar day, aligned with the source panel's calendar.
struct DailySeries {
    std::vector<Date> dates;
    std::vector<double> values;
};

/// Per-county mean daily inflow over a baseline window. Counties with no
/// inflow in the window carry an explicit 0.
class BaselineTable {
public:
    BaselineTable() = default;
    explicit BaselineTable(std::vector<std::pair<CountyId, double>> baselines);
    std::optional<double> baseline(CountyId c) const;
    const std::vector<std::pair<CountyId, double>>& entries() const { return entries_; }

private:
    std::vector<std::pair<CountyId, double>> entries_;  // sorted by county
};

/// Percent change of a week's mean daily inflow against the baseline.
/// Counties with baseline 0 are undefined (nullopt), not errors.
struct WeeklyChange {
    Date week_monday;
    std::vector<std::pair<CountyId, std::optional<double>>> pct;  // sorted by county
};

/// Region-level daily flow metrics. Intra-region flows are excluded from
/// both directions; origin/destination counts are distinct external
/// counties with positive flow.
struct RegionFlowMetrics {
    Date date;
    double inflow = 0;
    double outflow = 0;
    int n_origins = 0;
    int n_destinations = 0;
};

enum class RegionMetric { inflow, outflow, n_origins, n_destinations };

/// Total inter-county trips per day. Every inter-county trip is an inflow
/// to exactly one county, so this equals the national inflow total.
DailySeries national_inflow_series(const TripPanel& panel);

/// Centered moving average over calendar-day index, window truncated at the
/// edges. Window must be odd and >= 1.
DailySeries moving_average(const DailySeries& s, int window = 3);

/// Mean daily total inflow per county over the calendar days in
/// [window_start, window_end]. Throws std::invalid_argument when the window
/// misses the calendar entirely.
BaselineTable county_baselines(const TripPanel& panel, Date window_start, Date window_end);

/// Percent change of the week containing `week_of` (Monday-anchored)
/// against the baseline. Throws when the week holds no calendar day.
WeeklyChange weekly_pct_change(const TripPanel& panel, Date week_of, const BaselineTable& baselines);

/// Fraction of defined entries with strictly positive change. Throws when
/// every entry is undefined.
double share_with_increase(const WeeklyChange& changes);

/// Throws std::out_of_range when d is not a calendar day.
RegionFlowMetrics region_flow_metrics(const TripPanel& panel, const RegionSpec& region, Date d);

/// Competition rank (ties share the minimum rank) of the aggregated region
/// against every county outside it, descending by the chosen metric.
int region_rank(const TripPanel& panel, const RegionSpec& region, RegionMetric metric, Date d);

/// Top-k external destinations by total region outflow over the window's
/// calendar days; descending trips, ties by ascending FIPS.
std::vector<std::pair<CountyId, double>> top_destinations(const TripPanel& panel,
                                                          const RegionSpec& region,
                                                          Date window_start, Date window_end,
                                                          int k);

struct SpreadResult {
    double mean_daily_destinations = 0;
    double fraction_of_counties = 0;
};

/// Mean daily count of distinct external destinations receiving region
/// outflow across the window, and that count as a fraction of the total
/// county universe.
SpreadResult destination_spread(const TripPanel& panel, const RegionSpec& region,
                                Date window_start, Date window_end, int total_county_count = 3143);

}  // namespace flowrisk

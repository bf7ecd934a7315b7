#include "flowrisk/mobility.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace flowrisk {

namespace {

/// Calendar-day index range [lo, hi) intersecting a civil-date window.
std::pair<int, int> window_day_range(const AnalysisCalendar& cal, Date start, Date end) {
    const auto& days = cal.days();
    auto lo = std::lower_bound(days.begin(), days.end(), start);
    auto hi = std::upper_bound(days.begin(), days.end(), end);
    return {static_cast<int>(lo - days.begin()), static_cast<int>(hi - days.begin())};
}

}  // namespace

BaselineTable::BaselineTable(std::vector<std::pair<CountyId, double>> baselines)
    : entries_(std::move(baselines)) {
    std::sort(entries_.begin(), entries_.end());
}

std::optional<double> BaselineTable::baseline(CountyId c) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), c,
                               [](const auto& e, CountyId id) { return e.first < id; });
    if (it == entries_.end() || it->first != c) return std::nullopt;
    return it->second;
}

DailySeries national_inflow_series(const TripPanel& panel) {
    if (panel.calendar().empty()) throw std::invalid_argument("panel has an empty calendar");
    const int n = static_cast<int>(panel.calendar().size());
    DailySeries out;
    out.dates = panel.calendar().days();
    out.values.assign(static_cast<std::size_t>(n), 0.0);
#pragma omp parallel for schedule(static)
    for (int di = 0; di < n; ++di) {
        double total = 0;
        for (const TripPanel::Flow& f : panel.day_flows(di)) total += f.trips;
        out.values[static_cast<std::size_t>(di)] = total;
    }
    return out;
}

DailySeries moving_average(const DailySeries& s, int window) {
    if (window < 1 || window % 2 == 0)
        throw std::invalid_argument("moving average window must be odd and >= 1");
    const int n = static_cast<int>(s.values.size());
    const int half = window / 2;
    DailySeries out;
    out.dates = s.dates;
    out.values.assign(s.values.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i + half);
        double sum = 0;
        for (int j = lo; j <= hi; ++j) sum += s.values[static_cast<std::size_t>(j)];
        out.values[static_cast<std::size_t>(i)] = sum / (hi - lo + 1);
    }
    return out;
}

BaselineTable county_baselines(const TripPanel& panel, Date window_start, Date window_end) {
    auto [lo, hi] = window_day_range(panel.calendar(), window_start, window_end);
    if (lo >= hi) throw std::invalid_argument("baseline window contains no calendar day");
    const int n_days = hi - lo;
    const auto& counties = panel.counties();
    std::vector<double> inflow(counties.size(), 0.0);
    for (int di = lo; di < hi; ++di)
        for (const TripPanel::Flow& f : panel.day_flows(di))
            inflow[static_cast<std::size_t>(*panel.county_index(f.destination))] += f.trips;
    std::vector<std::pair<CountyId, double>> entries;
    entries.reserve(counties.size());
    for (std::size_t i = 0; i < counties.size(); ++i)
        entries.emplace_back(counties[i], inflow[i] / n_days);
    return BaselineTable(std::move(entries));
}

WeeklyChange weekly_pct_change(const TripPanel& panel, Date week_of, const BaselineTable& baselines) {
    const Date monday = week_of.week_start();
    auto [lo, hi] = window_day_range(panel.calendar(), monday, monday + 6);
    if (lo >= hi) throw std::invalid_argument("week of " + monday.to_string() +
                                              " contains no calendar day");
    const int n_days = hi - lo;
    const auto& counties = panel.counties();
    std::vector<double> inflow(counties.size(), 0.0);
    for (int di = lo; di < hi; ++di)
        for (const TripPanel::Flow& f : panel.day_flows(di))
            inflow[static_cast<std::size_t>(*panel.county_index(f.destination))] += f.trips;

    WeeklyChange out;
    out.week_monday = monday;
    out.pct.reserve(counties.size());
    for (std::size_t i = 0; i < counties.size(); ++i) {
        const auto base = baselines.baseline(counties[i]);
        const double week_mean = inflow[i] / n_days;
        if (!base || *base == 0)
            out.pct.emplace_back(counties[i], std::nullopt);
        else
            out.pct.emplace_back(counties[i], 100.0 * (week_mean - *base) / *base);
    }
    return out;
}

double share_with_increase(const WeeklyChange& changes) {
    std::size_t defined = 0, increased = 0;
    for (const auto& [county, pct] : changes.pct) {
        (void)county;
        if (!pct) continue;
        ++defined;
        if (*pct > 0) ++increased;
    }
    if (defined == 0) throw std::invalid_argument("no defined percent-change entries");
    return static_cast<double>(increased) / static_cast<double>(defined);
}

RegionFlowMetrics region_flow_metrics(const TripPanel& panel, const RegionSpec& region, Date d) {
    auto di = panel.calendar().index_of(d);
    if (!di) throw std::out_of_range("date " + d.to_string() + " is not a calendar day");
    RegionFlowMetrics m;
    m.date = d;
    std::set<CountyId> origins, destinations;
    for (const TripPanel::Flow& f : panel.day_flows(*di)) {
        const bool from_region = region.contains(f.origin);
        const bool to_region = region.contains(f.destination);
        if (from_region && to_region) continue;  // intra-region
        if (to_region && f.trips > 0) {
            m.inflow += f.trips;
            origins.insert(f.origin);
        } else if (from_region && f.trips > 0) {
            m.outflow += f.trips;
            destinations.insert(f.destination);
        }
    }
    m.n_origins = static_cast<int>(origins.size());
    m.n_destinations = static_cast<int>(destinations.size());
    return m;
}

int region_rank(const TripPanel& panel, const RegionSpec& region, RegionMetric metric, Date d) {
    auto di = panel.calendar().index_of(d);
    if (!di) throw std::out_of_range("date " + d.to_string() + " is not a calendar day");
    const auto& counties = panel.counties();
    const std::size_t n = counties.size();
    // per-county totals and distinct-counterpart counts for singleton units
    std::vector<double> in_total(n, 0.0), out_total(n, 0.0);
    std::vector<std::set<CountyId>> in_from(n), out_to(n);
    for (const TripPanel::Flow& f : panel.day_flows(*di)) {
        if (f.trips <= 0) continue;
        const auto oi = static_cast<std::size_t>(*panel.county_index(f.origin));
        const auto dj = static_cast<std::size_t>(*panel.county_index(f.destination));
        in_total[dj] += f.trips;
        out_total[oi] += f.trips;
        in_from[dj].insert(f.origin);
        out_to[oi].insert(f.destination);
    }
    const RegionFlowMetrics rm = region_flow_metrics(panel, region, d);
    auto value_of = [&](std::size_t i) -> double {
        switch (metric) {
            case RegionMetric::inflow: return in_total[i];
            case RegionMetric::outflow: return out_total[i];
            case RegionMetric::n_origins: return static_cast<double>(in_from[i].size());
            case RegionMetric::n_destinations: return static_cast<double>(out_to[i].size());
        }
        return 0;
    };
    double region_value = 0;
    switch (metric) {
        case RegionMetric::inflow: region_value = rm.inflow; break;
        case RegionMetric::outflow: region_value = rm.outflow; break;
        case RegionMetric::n_origins: region_value = rm.n_origins; break;
        case RegionMetric::n_destinations: region_value = rm.n_destinations; break;
    }
    int rank = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (region.contains(counties[i])) continue;
        if (value_of(i) > region_value) ++rank;
    }
    return rank;
}

std::vector<std::pair<CountyId, double>> top_destinations(const TripPanel& panel,
                                                          const RegionSpec& region,
                                                          Date window_start, Date window_end,
                                                          int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    auto [lo, hi] = window_day_range(panel.calendar(), window_start, window_end);
    std::map<CountyId, double> totals;
    for (int di = lo; di < hi; ++di) {
        for (CountyId member : region.members()) {
            panel.for_each_outbound(di, member, [&](const TripPanel::Flow& f) {
                if (!region.contains(f.destination)) totals[f.destination] += f.trips;
            });
        }
    }
    std::vector<std::pair<CountyId, double>> ranked(totals.begin(), totals.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > static_cast<std::size_t>(k)) ranked.resize(static_cast<std::size_t>(k));
    return ranked;
}

SpreadResult destination_spread(const TripPanel& panel, const RegionSpec& region,
                                Date window_start, Date window_end, int total_county_count) {
    auto [lo, hi] = window_day_range(panel.calendar(), window_start, window_end);
    if (lo >= hi) throw std::invalid_argument("spread window contains no calendar day");
    const int n_days = hi - lo;
    std::vector<int> day_counts(static_cast<std::size_t>(n_days), 0);
#pragma omp parallel for schedule(static)
    for (int di = lo; di < hi; ++di) {
        std::set<CountyId> dests;
        for (CountyId member : region.members()) {
            panel.for_each_outbound(di, member, [&](const TripPanel::Flow& f) {
                if (f.trips > 0 && !region.contains(f.destination)) dests.insert(f.destination);
            });
        }
        day_counts[static_cast<std::size_t>(di - lo)] = static_cast<int>(dests.size());
    }
    double sum = 0;
    for (int c : day_counts) sum += c;
    SpreadResult r;
    r.mean_daily_destinations = sum / n_days;
    r.fraction_of_counties = r.mean_daily_destinations / total_county_count;
    return r;
}

}  // namespace flowrisk

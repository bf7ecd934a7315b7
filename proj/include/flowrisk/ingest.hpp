#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flowrisk/calendar.hpp"
#include "flowrisk/dates.hpp"

namespace flowrisk {

/// One origin-destination-day flow. Inter-county only: origin != destination.
/// Trips are non-negative reals (the source data are device-weighted
/// estimates, not raw counts).
struct TripRecord {
    Date date;
    CountyId origin;
    CountyId destination;
    double trips = 0;
};

/// Sparse daily county-to-county flow panel over an analysis calendar.
/// Per day, flows are stored sorted by (destination, origin); summations
/// over inbound flows therefore always run in ascending origin FIPS order,
/// which pins the floating-point reduction order.
class TripPanel {
public:
    struct Flow {
        CountyId origin;
        CountyId destination;
        double trips;
    };

    /// Validates and indexes the records. Throws std::invalid_argument on
    /// self-loops, negative trips, off-calendar dates, or duplicate
    /// (date, origin, destination) keys.
    TripPanel(AnalysisCalendar calendar, std::vector<TripRecord> records);

    const AnalysisCalendar& calendar() const { return calendar_; }
    std::size_t record_count() const;

    /// All flows of one calendar day, sorted by (destination, origin).
    std::span<const Flow> day_flows(int day_index) const;

    /// Inbound flows of `dest` on one day, ascending origin.
    std::span<const Flow> inbound(int day_index, CountyId dest) const;

    /// Outbound flows of `origin` on one day in ascending destination
    /// order, delivered through a callback.
    template <typename F>
    void for_each_outbound(int day_index, CountyId origin, F&& fn) const {
        const auto& idx = by_origin_[static_cast<std::size_t>(day_index)];
        const auto& flows = days_[static_cast<std::size_t>(day_index)];
        auto lo = std::lower_bound(idx.begin(), idx.end(), origin, [&](std::uint32_t i, CountyId o) {
            return flows[i].origin < o;
        });
        for (; lo != idx.end() && flows[*lo].origin == origin; ++lo) fn(flows[*lo]);
    }

    /// Sorted distinct counties appearing as origin or destination anywhere.
    const std::vector<CountyId>& counties() const { return counties_; }
    std::optional<int> county_index(CountyId c) const;

    /// Flattens back to records (date-major, then destination, origin),
    /// e.g. for writing the panel out again.
    std::vector<TripRecord> to_records() const;

private:
    AnalysisCalendar calendar_;
    std::vector<std::vector<Flow>> days_;             // per calendar day, sorted (dest, origin)
    std::vector<std::vector<std::uint32_t>> by_origin_;  // per-day index sorted (origin, dest)
    std::vector<CountyId> counties_;
};

/// Per-county daily cumulative confirmed cases on a contiguous daily grid.
/// Values are non-negative reals so synthetic case constructions round-trip
/// through CSV without loss; real-world inputs carry integers.
class CaseSeries {
public:
    CaseSeries() = default;

    struct CountyTrack {
        Date first;                     // first reported date
        std::vector<double> cumulative; // daily, first..coverage_end
    };

    /// Builds from per-county (date, cumulative) samples with strictly
    /// increasing dates. Interior gaps are filled by carrying the last
    /// value forward; each county's track is extended to the latest date
    /// seen anywhere in the input.
    static CaseSeries from_samples(std::map<CountyId, std::vector<std::pair<Date, double>>> samples);

    /// Cumulative cases of `c` on `d`: 0 before the first report (or for a
    /// county with no reports at all); the last value carries forward past
    /// the end of the track. Availability past coverage_end() is the
    /// caller's concern (see risk severity).
    double cumulative_on(CountyId c, Date d) const;

    /// Latest reported date across all counties; nullopt when empty.
    std::optional<Date> coverage_end() const { return coverage_end_; }

    const std::map<CountyId, CountyTrack>& tracks() const { return tracks_; }

private:
    std::map<CountyId, CountyTrack> tracks_;
    std::optional<Date> coverage_end_;
};

/// One county's population and the four internal-risk covariates.
struct DemographicsRecord {
    CountyId county;
    std::int64_t population = 0;       // > 0
    double pct_age65 = 0;              // [0, 100]
    double pct_male = 0;               // [0, 100]
    double pct_african_american = 0;   // [0, 100]
    double median_income = 0;          // > 0, USD/year
};

class DemographicsTable {
public:
    DemographicsTable() = default;
    explicit DemographicsTable(std::vector<DemographicsRecord> records);

    const DemographicsRecord* find(CountyId c) const;
    bool contains(CountyId c) const { return find(c) != nullptr; }
    const std::vector<DemographicsRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

private:
    std::vector<DemographicsRecord> records_;  // sorted by county
};

enum class Severity { warning, fatal };

struct ValidationIssue {
    Severity severity;
    std::string code;
    std::string message;
    std::string location;  // "file:line" or a FIPS code
};

struct DatasetCounts {
    std::size_t read = 0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;  // dropped or refused rows
};

/// Load/validation outcome. Any fatal entry means the corresponding load
/// must not be used downstream.
struct ValidationReport {
    std::vector<ValidationIssue> issues;
    std::map<std::string, DatasetCounts> counts;

    bool has_fatal() const;
    void warn(std::string code, std::string message, std::string location = {});
    void fatal(std::string code, std::string message, std::string location = {});
};

/// Loads OD CSVs (`date,origin_fips,destination_fips,trips`). Rows on
/// excluded days (weekends/holidays) are dropped and counted; self-loops,
/// duplicates, negative trips and malformed rows are fatal. Returns nullopt
/// after any fatal.
std::optional<TripPanel> load_trips(const std::vector<std::string>& paths,
                                    const AnalysisCalendar& calendar, ValidationReport& report);

/// Loads a case CSV (`date,fips,cumulative_cases`). Decreasing cumulative
/// values are accepted with a warning (real-world corrections occur).
std::optional<CaseSeries> load_cases(const std::string& path, ValidationReport& report);

/// Loads a demographics CSV
/// (`fips,population,pct_age65,pct_male,pct_african_american,median_income`).
std::optional<DemographicsTable> load_demographics(const std::string& path,
                                                   ValidationReport& report);

/// Consistency pass across the three datasets: warns about trip counties
/// missing demographics or cases; fatal when more than half of the total
/// trip volume comes from counties lacking demographics.
void cross_validate(const TripPanel& panel, const CaseSeries& cases,
                    const DemographicsTable& demo, ValidationReport& report);

void write_trips_csv(const std::string& path, const TripPanel& panel);
void write_cases_csv(const std::string& path, const CaseSeries& cases);
void write_demographics_csv(const std::string& path, const DemographicsTable& demo);

}  // namespace flowrisk

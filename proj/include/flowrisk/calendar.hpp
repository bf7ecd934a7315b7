#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "flowrisk/dates.hpp"

namespace flowrisk {

/// Numeric 5-digit FIPS county identifier. Comparison is by numeric value;
/// rendering zero-pads to five digits.
struct CountyId {
    std::uint32_t fips = 0;
    auto operator<=>(const CountyId&) const = default;
};

/// Parses a FIPS code from text (with or without leading zeros) and checks
/// the valid range [01001, 99999]. Throws std::invalid_argument.
CountyId parse_fips(std::string_view text);
bool valid_fips(std::uint32_t fips);
std::string to_string(CountyId id);

/// The study calendar: every Mon-Fri date in [start, end] that is not a
/// declared holiday, in increasing order. Immutable once built.
class AnalysisCalendar {
public:
    AnalysisCalendar(Date start, Date end, std::set<Date> holidays);

    Date start() const { return start_; }
    Date end() const { return end_; }
    const std::set<Date>& holidays() const { return holidays_; }
    const std::vector<Date>& days() const { return days_; }
    std::size_t size() const { return days_.size(); }
    bool empty() const { return days_.empty(); }

    bool contains(Date d) const { return index_of(d).has_value(); }
    std::optional<int> index_of(Date d) const;

    /// Latest analysis day <= d, if any.
    std::optional<Date> analysis_day_on_or_before(Date d) const;

private:
    Date start_, end_;
    std::set<Date> holidays_;
    std::vector<Date> days_;
};

/// Throws std::invalid_argument when start > end.
AnalysisCalendar build_calendar(Date start, Date end, std::set<Date> holidays = {});

enum class Stage { pre_pandemic, behavior_change, quarantine_fatigue, partial_reopening };

std::string_view to_string(Stage s);

/// Contiguous stages tiling [range_start, range_end]. Each cut date is the
/// LAST day of the stage it closes, so with cuts Mar 13 / Apr 13 / Apr 23:
/// Mar 13 is pre_pandemic, Apr 14 is quarantine_fatigue, Apr 24 is
/// partial_reopening.
class StagePartition {
public:
    StagePartition(Date range_start, Date range_end,
                   std::vector<std::pair<Date, Stage>> boundaries, Stage final_stage);

    Date range_start() const { return start_; }
    Date range_end() const { return end_; }
    const std::vector<std::pair<Date, Stage>>& boundaries() const { return boundaries_; }
    Stage final_stage() const { return final_; }

    /// Throws std::out_of_range when d is outside [range_start, range_end].
    Stage stage_of(Date d) const;

    /// First and last civil date of a stage within the covered range.
    std::pair<Date, Date> stage_range(Stage s) const;

private:
    Date start_, end_;
    std::vector<std::pair<Date, Stage>> boundaries_;
    Stage final_;
};

/// The paper's four-stage layout from three cut dates.
StagePartition make_stage_partition(Date range_start, Date range_end,
                                    Date cut_pre, Date cut_behavior, Date cut_fatigue);

/// A named set of counties treated as one aggregated unit (e.g. the five
/// NYC boroughs). Members are kept sorted and distinct.
class RegionSpec {
public:
    RegionSpec(std::string name, std::vector<CountyId> members);

    const std::string& name() const { return name_; }
    const std::vector<CountyId>& members() const { return members_; }
    bool contains(CountyId c) const;

private:
    std::string name_;
    std::vector<CountyId> members_;
};

/// Week-denominated lag; the day offset is always 7*weeks and applies to
/// civil days (disease progression ignores the analysis calendar).
struct LagSpec {
    int weeks = 0;
    int days() const { return 7 * weeks; }
    auto operator<=>(const LagSpec&) const = default;
};

/// Modeling periods: the four stages plus their after-pandemic union.
enum class Period {
    all_after_pandemic,
    behavior_change,
    quarantine_fatigue,
    partial_reopening,
    pre_pandemic,
};

std::string_view to_string(Period p);
std::optional<Period> parse_period(std::string_view text);
const std::vector<Period>& all_periods();

/// Civil date range a period covers under a partition.
std::pair<Date, Date> period_range(const StagePartition& partition, Period p);

}  // namespace flowrisk

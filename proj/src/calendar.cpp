#include "flowrisk/calendar.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace flowrisk {

bool valid_fips(std::uint32_t fips) { return fips >= 1001 && fips <= 99999; }

CountyId parse_fips(std::string_view text) {
    if (text.empty() || text.size() > 5)
        throw std::invalid_argument("bad FIPS code: '" + std::string(text) + "'");
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !valid_fips(value))
        throw std::invalid_argument("bad FIPS code: '" + std::string(text) + "'");
    return CountyId{value};
}

std::string to_string(CountyId id) {
    char buf[6];
    std::snprintf(buf, sizeof buf, "%05u", id.fips);
    return buf;
}

AnalysisCalendar::AnalysisCalendar(Date start, Date end, std::set<Date> holidays)
    : start_(start), end_(end), holidays_(std::move(holidays)) {
    if (start > end) throw std::invalid_argument("calendar start after end");
    for (Date d = start; d <= end; ++d)
        if (d.is_weekday() && !holidays_.count(d)) days_.push_back(d);
}

std::optional<int> AnalysisCalendar::index_of(Date d) const {
    auto it = std::lower_bound(days_.begin(), days_.end(), d);
    if (it == days_.end() || *it != d) return std::nullopt;
    return static_cast<int>(it - days_.begin());
}

std::optional<Date> AnalysisCalendar::analysis_day_on_or_before(Date d) const {
    auto it = std::upper_bound(days_.begin(), days_.end(), d);
    if (it == days_.begin()) return std::nullopt;
    return *std::prev(it);
}

AnalysisCalendar build_calendar(Date start, Date end, std::set<Date> holidays) {
    return AnalysisCalendar(start, end, std::move(holidays));
}

std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::pre_pandemic: return "pre_pandemic";
        case Stage::behavior_change: return "behavior_change";
        case Stage::quarantine_fatigue: return "quarantine_fatigue";
        case Stage::partial_reopening: return "partial_reopening";
    }
    return "?";
}

StagePartition::StagePartition(Date range_start, Date range_end,
                               std::vector<std::pair<Date, Stage>> boundaries, Stage final_stage)
    : start_(range_start), end_(range_end), boundaries_(std::move(boundaries)), final_(final_stage) {
    if (start_ > end_) throw std::invalid_argument("partition range start after end");
    Date prev = start_ - 1;
    for (const auto& [cut, stage] : boundaries_) {
        (void)stage;
        if (cut <= prev) throw std::invalid_argument("stage cut dates must be strictly increasing");
        if (cut < start_ || cut > end_)
            throw std::invalid_argument("stage cut " + cut.to_string() + " outside covered range");
        prev = cut;
    }
}

Stage StagePartition::stage_of(Date d) const {
    if (d < start_ || d > end_)
        throw std::out_of_range("date " + d.to_string() + " outside stage partition range");
    for (const auto& [cut, stage] : boundaries_)
        if (d <= cut) return stage;
    return final_;
}

std::pair<Date, Date> StagePartition::stage_range(Stage s) const {
    Date lo = start_;
    for (const auto& [cut, stage] : boundaries_) {
        if (stage == s) return {lo, cut};
        lo = cut + 1;
    }
    if (s == final_) return {lo, end_};
    throw std::invalid_argument("stage not present in partition");
}

StagePartition make_stage_partition(Date range_start, Date range_end,
                                    Date cut_pre, Date cut_behavior, Date cut_fatigue) {
    return StagePartition(range_start, range_end,
                          {{cut_pre, Stage::pre_pandemic},
                           {cut_behavior, Stage::behavior_change},
                           {cut_fatigue, Stage::quarantine_fatigue}},
                          Stage::partial_reopening);
}

RegionSpec::RegionSpec(std::string name, std::vector<CountyId> members)
    : name_(std::move(name)), members_(std::move(members)) {
    if (members_.empty()) throw std::invalid_argument("region '" + name_ + "' has no members");
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool RegionSpec::contains(CountyId c) const {
    return std::binary_search(members_.begin(), members_.end(), c);
}

std::string_view to_string(Period p) {
    switch (p) {
        case Period::all_after_pandemic: return "all_after_pandemic";
        case Period::behavior_change: return "behavior_change";
        case Period::quarantine_fatigue: return "quarantine_fatigue";
        case Period::partial_reopening: return "partial_reopening";
        case Period::pre_pandemic: return "pre_pandemic";
    }
    return "?";
}

std::optional<Period> parse_period(std::string_view text) {
    for (Period p : all_periods())
        if (to_string(p) == text) return p;
    return std::nullopt;
}

const std::vector<Period>& all_periods() {
    static const std::vector<Period> periods{
        Period::all_after_pandemic, Period::behavior_change, Period::quarantine_fatigue,
        Period::partial_reopening, Period::pre_pandemic};
    return periods;
}

std::pair<Date, Date> period_range(const StagePartition& partition, Period p) {
    switch (p) {
        case Period::pre_pandemic: return partition.stage_range(Stage::pre_pandemic);
        case Period::behavior_change: return partition.stage_range(Stage::behavior_change);
        case Period::quarantine_fatigue: return partition.stage_range(Stage::quarantine_fatigue);
        case Period::partial_reopening: return partition.stage_range(Stage::partial_reopening);
        case Period::all_after_pandemic:
            return {partition.stage_range(Stage::behavior_change).first, partition.range_end()};
    }
    throw std::invalid_argument("unknown period");
}

}  // namespace flowrisk

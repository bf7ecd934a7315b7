#include "flowrisk/ingest.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "flowrisk/csv.hpp"

namespace flowrisk {

namespace {

constexpr std::string_view kTripsHeader = "date,origin_fips,destination_fips,trips";
constexpr std::string_view kCasesHeader = "date,fips,cumulative_cases";
constexpr std::string_view kDemoHeader =
    "fips,population,pct_age65,pct_male,pct_african_american,median_income";

std::string at_line(const std::string& path, std::size_t line) {
    return path + ":" + std::to_string(line);
}

}  // namespace

TripPanel::TripPanel(AnalysisCalendar calendar, std::vector<TripRecord> records)
    : calendar_(std::move(calendar)) {
    days_.resize(calendar_.size());
    for (const TripRecord& r : records) {
        if (r.origin == r.destination)
            throw std::invalid_argument("self-loop flow for county " + to_string(r.origin));
        if (r.trips < 0) throw std::invalid_argument("negative trips on " + r.date.to_string());
        auto idx = calendar_.index_of(r.date);
        if (!idx)
            throw std::invalid_argument("trip record on non-calendar day " + r.date.to_string());
        days_[static_cast<std::size_t>(*idx)].push_back({r.origin, r.destination, r.trips});
    }
    by_origin_.resize(days_.size());
    std::vector<CountyId> seen;
    for (std::size_t di = 0; di < days_.size(); ++di) {
        auto& flows = days_[di];
        std::sort(flows.begin(), flows.end(), [](const Flow& a, const Flow& b) {
            return std::tie(a.destination, a.origin) < std::tie(b.destination, b.origin);
        });
        for (std::size_t i = 1; i < flows.size(); ++i)
            if (flows[i].origin == flows[i - 1].origin &&
                flows[i].destination == flows[i - 1].destination)
                throw std::invalid_argument("duplicate flow " + to_string(flows[i].origin) + "->" +
                                            to_string(flows[i].destination) + " on " +
                                            calendar_.days()[di].to_string());
        auto& idx = by_origin_[di];
        idx.resize(flows.size());
        for (std::uint32_t i = 0; i < flows.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
            return std::tie(flows[a].origin, flows[a].destination) <
                   std::tie(flows[b].origin, flows[b].destination);
        });
        for (const Flow& f : flows) {
            seen.push_back(f.origin);
            seen.push_back(f.destination);
        }
    }
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    counties_ = std::move(seen);
}

std::size_t TripPanel::record_count() const {
    std::size_t n = 0;
    for (const auto& d : days_) n += d.size();
    return n;
}

std::span<const TripPanel::Flow> TripPanel::day_flows(int day_index) const {
    return days_[static_cast<std::size_t>(day_index)];
}

std::span<const TripPanel::Flow> TripPanel::inbound(int day_index, CountyId dest) const {
    const auto& flows = days_[static_cast<std::size_t>(day_index)];
    auto lo = std::lower_bound(flows.begin(), flows.end(), dest,
                               [](const Flow& f, CountyId d) { return f.destination < d; });
    auto hi = lo;
    while (hi != flows.end() && hi->destination == dest) ++hi;
    return {lo, hi};
}

std::optional<int> TripPanel::county_index(CountyId c) const {
    auto it = std::lower_bound(counties_.begin(), counties_.end(), c);
    if (it == counties_.end() || *it != c) return std::nullopt;
    return static_cast<int>(it - counties_.begin());
}

std::vector<TripRecord> TripPanel::to_records() const {
    std::vector<TripRecord> out;
    out.reserve(record_count());
    for (std::size_t di = 0; di < days_.size(); ++di)
        for (const Flow& f : days_[di])
            out.push_back({calendar_.days()[di], f.origin, f.destination, f.trips});
    return out;
}

CaseSeries CaseSeries::from_samples(
    std::map<CountyId, std::vector<std::pair<Date, double>>> samples) {
    CaseSeries cs;
    std::optional<Date> global_end;
    for (const auto& [county, rows] : samples) {
        if (rows.empty()) continue;
        if (!global_end || rows.back().first > *global_end) global_end = rows.back().first;
    }
    cs.coverage_end_ = global_end;
    if (!global_end) return cs;
    for (auto& [county, rows] : samples) {
        if (rows.empty()) continue;
        CountyTrack track;
        track.first = rows.front().first;
        track.cumulative.reserve(static_cast<std::size_t>(*global_end - track.first) + 1);
        std::size_t next = 0;
        double last = 0;
        for (Date d = track.first; d <= *global_end; ++d) {
            if (next < rows.size() && rows[next].first == d) last = rows[next++].second;
            track.cumulative.push_back(last);
        }
        cs.tracks_.emplace(county, std::move(track));
    }
    return cs;
}

double CaseSeries::cumulative_on(CountyId c, Date d) const {
    auto it = tracks_.find(c);
    if (it == tracks_.end()) return 0;
    const CountyTrack& t = it->second;
    if (d < t.first) return 0;
    std::size_t offset = static_cast<std::size_t>(d - t.first);
    if (offset >= t.cumulative.size()) return t.cumulative.back();
    return t.cumulative[offset];
}

DemographicsTable::DemographicsTable(std::vector<DemographicsRecord> records)
    : records_(std::move(records)) {
    std::sort(records_.begin(), records_.end(),
              [](const DemographicsRecord& a, const DemographicsRecord& b) {
                  return a.county < b.county;
              });
    for (std::size_t i = 1; i < records_.size(); ++i)
        if (records_[i].county == records_[i - 1].county)
            throw std::invalid_argument("duplicate demographics for county " +
                                        to_string(records_[i].county));
}

const DemographicsRecord* DemographicsTable::find(CountyId c) const {
    auto it = std::lower_bound(records_.begin(), records_.end(), c,
                               [](const DemographicsRecord& r, CountyId id) { return r.county < id; });
    if (it == records_.end() || it->county != c) return nullptr;
    return &*it;
}

bool ValidationReport::has_fatal() const {
    return std::any_of(issues.begin(), issues.end(),
                       [](const ValidationIssue& i) { return i.severity == Severity::fatal; });
}

void ValidationReport::warn(std::string code, std::string message, std::string location) {
    issues.push_back({Severity::warning, std::move(code), std::move(message), std::move(location)});
}

void ValidationReport::fatal(std::string code, std::string message, std::string location) {
    issues.push_back({Severity::fatal, std::move(code), std::move(message), std::move(location)});
}

std::optional<TripPanel> load_trips(const std::vector<std::string>& paths,
                                    const AnalysisCalendar& calendar, ValidationReport& report) {
    DatasetCounts& counts = report.counts["trips"];
    if (paths.empty()) {
        report.fatal("no_input", "no trip files configured");
        return std::nullopt;
    }
    std::vector<TripRecord> records;
    // duplicate detection across all files: (dest, origin) -> dates seen
    std::unordered_map<std::uint64_t, std::vector<Date>> seen;
    std::size_t excluded_days = 0;

    for (const std::string& path : paths) {
        std::string err;
        auto reader = csv::Reader::open(path, kTripsHeader, &err);
        if (!reader) {
            report.fatal("unreadable", err, path);
            return std::nullopt;
        }
        std::vector<std::string_view> fields;
        while (reader->next(fields)) {
            ++counts.read;
            const std::string loc = at_line(path, reader->line_number());
            if (fields.size() != 4) {
                report.fatal("malformed_row", "expected 4 fields, got " +
                                                  std::to_string(fields.size()), loc);
                return std::nullopt;
            }
            TripRecord rec;
            try {
                rec.date = Date::parse(fields[0]);
                rec.origin = parse_fips(fields[1]);
                rec.destination = parse_fips(fields[2]);
                rec.trips = csv::parse_double(fields[3]);
            } catch (const std::invalid_argument& e) {
                report.fatal("malformed_row", e.what(), loc);
                return std::nullopt;
            }
            if (rec.origin == rec.destination) {
                report.fatal("self_loop", "origin equals destination (" + to_string(rec.origin) + ")",
                             loc);
                return std::nullopt;
            }
            if (rec.trips < 0) {
                report.fatal("negative_trips", "trips value " + std::string(fields[3]) + " < 0", loc);
                return std::nullopt;
            }
            if (!calendar.contains(rec.date)) {
                ++counts.rejected;
                ++excluded_days;
                continue;
            }
            const std::uint64_t key =
                (static_cast<std::uint64_t>(rec.destination.fips) << 32) | rec.origin.fips;
            auto& dates = seen[key];
            if (std::find(dates.begin(), dates.end(), rec.date) != dates.end()) {
                report.fatal("duplicate_record",
                             "duplicate flow " + to_string(rec.origin) + "->" +
                                 to_string(rec.destination) + " on " + rec.date.to_string(),
                             loc);
                return std::nullopt;
            }
            dates.push_back(rec.date);
            records.push_back(rec);
            ++counts.accepted;
        }
    }
    if (excluded_days > 0)
        report.warn("excluded_day", std::to_string(excluded_days) +
                                        " rows on weekends/holidays dropped from the panel");
    return TripPanel(calendar, std::move(records));
}

std::optional<CaseSeries> load_cases(const std::string& path, ValidationReport& report) {
    DatasetCounts& counts = report.counts["cases"];
    std::string err;
    auto reader = csv::Reader::open(path, kCasesHeader, &err);
    if (!reader) {
        report.fatal("unreadable", err, path);
        return std::nullopt;
    }
    std::map<CountyId, std::vector<std::pair<Date, double>>> samples;
    std::vector<std::string_view> fields;
    while (reader->next(fields)) {
        ++counts.read;
        const std::string loc = at_line(path, reader->line_number());
        if (fields.size() != 3) {
            report.fatal("malformed_row",
                         "expected 3 fields, got " + std::to_string(fields.size()), loc);
            return std::nullopt;
        }
        Date d;
        CountyId c;
        double value;
        try {
            d = Date::parse(fields[0]);
            c = parse_fips(fields[1]);
            value = csv::parse_double(fields[2]);
        } catch (const std::invalid_argument& e) {
            report.fatal("malformed_row", e.what(), loc);
            return std::nullopt;
        }
        if (value < 0) {
            report.fatal("negative_cases", "cumulative cases " + std::string(fields[2]) + " < 0",
                         loc);
            return std::nullopt;
        }
        auto& rows = samples[c];
        if (!rows.empty() && d <= rows.back().first) {
            report.fatal("unsorted_series",
                         "dates for county " + to_string(c) + " not strictly increasing", loc);
            return std::nullopt;
        }
        rows.emplace_back(d, value);
        ++counts.accepted;
    }
    // gap and correction bookkeeping before the grid is filled
    for (const auto& [county, rows] : samples) {
        std::size_t gaps = 0;
        bool decreased = false;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            gaps += static_cast<std::size_t>(rows[i].first - rows[i - 1].first) - 1;
            if (rows[i].second < rows[i - 1].second) decreased = true;
        }
        if (gaps > 0)
            report.warn("case_gap_filled",
                        std::to_string(gaps) + " interior gap days carried forward",
                        to_string(county));
        if (decreased)
            report.warn("cumulative_decrease", "cumulative series decreases (data correction?)",
                        to_string(county));
    }
    return CaseSeries::from_samples(std::move(samples));
}

std::optional<DemographicsTable> load_demographics(const std::string& path,
                                                   ValidationReport& report) {
    DatasetCounts& counts = report.counts["demographics"];
    std::string err;
    auto reader = csv::Reader::open(path, kDemoHeader, &err);
    if (!reader) {
        report.fatal("unreadable", err, path);
        return std::nullopt;
    }
    std::vector<DemographicsRecord> records;
    std::vector<std::string_view> fields;
    while (reader->next(fields)) {
        ++counts.read;
        const std::string loc = at_line(path, reader->line_number());
        if (fields.size() != 6) {
            report.fatal("malformed_row",
                         "expected 6 fields, got " + std::to_string(fields.size()), loc);
            return std::nullopt;
        }
        DemographicsRecord rec;
        try {
            rec.county = parse_fips(fields[0]);
            rec.population = csv::parse_int(fields[1]);
            rec.pct_age65 = csv::parse_double(fields[2]);
            rec.pct_male = csv::parse_double(fields[3]);
            rec.pct_african_american = csv::parse_double(fields[4]);
            rec.median_income = csv::parse_double(fields[5]);
        } catch (const std::invalid_argument& e) {
            report.fatal("malformed_row", e.what(), loc);
            return std::nullopt;
        }
        if (rec.population <= 0) {
            report.fatal("bad_population", "population must be positive", loc);
            return std::nullopt;
        }
        for (double pct : {rec.pct_age65, rec.pct_male, rec.pct_african_american}) {
            if (pct < 0 || pct > 100) {
                report.fatal("bad_percentage", "percentage outside [0,100]", loc);
                return std::nullopt;
            }
        }
        if (rec.median_income <= 0) {
            report.fatal("bad_income", "median income must be positive", loc);
            return std::nullopt;
        }
        for (const DemographicsRecord& prev : records) {
            if (prev.county == rec.county) {
                report.fatal("duplicate_county", "duplicate county " + to_string(rec.county), loc);
                return std::nullopt;
            }
        }
        records.push_back(rec);
        ++counts.accepted;
    }
    return DemographicsTable(std::move(records));
}

void cross_validate(const TripPanel& panel, const CaseSeries& cases,
                    const DemographicsTable& demo, ValidationReport& report) {
    double total_volume = 0;
    double volume_missing_demo = 0;
    std::vector<CountyId> missing_demo;
    std::vector<CountyId> missing_cases;

    std::vector<double> origin_volume(panel.counties().size(), 0);
    for (std::size_t di = 0; di < panel.calendar().size(); ++di) {
        for (const TripPanel::Flow& f : panel.day_flows(static_cast<int>(di))) {
            total_volume += f.trips;
            origin_volume[static_cast<std::size_t>(*panel.county_index(f.origin))] += f.trips;
        }
    }
    for (std::size_t ci = 0; ci < panel.counties().size(); ++ci) {
        CountyId c = panel.counties()[ci];
        if (!demo.contains(c)) {
            missing_demo.push_back(c);
            volume_missing_demo += origin_volume[ci];
        }
        if (!cases.tracks().count(c)) missing_cases.push_back(c);
    }
    for (CountyId c : missing_demo)
        report.warn("missing_demographics",
                    "trip county absent from demographics; excluded from risk computations",
                    to_string(c));
    for (CountyId c : missing_cases)
        report.warn("missing_cases", "trip county has no case reports (treated as zero cases)",
                    to_string(c));
    if (total_volume > 0 && volume_missing_demo / total_volume > 0.5)
        report.fatal("demographics_coverage",
                     "more than 50% of trip volume originates in counties lacking demographics");
}

void write_trips_csv(const std::string& path, const TripPanel& panel) {
    csv::Writer w(path);
    w.raw_line(kTripsHeader);
    for (const TripRecord& r : panel.to_records())
        w.row({r.date.to_string(), to_string(r.origin), to_string(r.destination),
               csv::format_double(r.trips)});
}

void write_cases_csv(const std::string& path, const CaseSeries& cases) {
    csv::Writer w(path);
    w.raw_line(kCasesHeader);
    for (const auto& [county, track] : cases.tracks()) {
        Date d = track.first;
        for (double v : track.cumulative) {
            w.row({d.to_string(), to_string(county), csv::format_double(v)});
            ++d;
        }
    }
}

void write_demographics_csv(const std::string& path, const DemographicsTable& demo) {
    csv::Writer w(path);
    w.raw_line(kDemoHeader);
    for (const DemographicsRecord& r : demo.records())
        w.row({to_string(r.county), csv::format_int(r.population), csv::format_double(r.pct_age65),
               csv::format_double(r.pct_male), csv::format_double(r.pct_african_american),
               csv::format_double(r.median_income)});
}

}  // namespace flowrisk

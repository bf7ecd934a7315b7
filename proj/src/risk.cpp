#include "flowrisk/risk.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace flowrisk {

namespace {

double weight_of(const CaseSeries& cases, const DemographicsRecord& rec, Date d) {
    return 1000.0 * cases.cumulative_on(rec.county, d) / static_cast<double>(rec.population);
}

std::pair<int, int> window_day_range(const AnalysisCalendar& cal, Date start, Date end) {
    const auto& days = cal.days();
    auto lo = std::lower_bound(days.begin(), days.end(), start);
    auto hi = std::upper_bound(days.begin(), days.end(), end);
    return {static_cast<int>(lo - days.begin()), static_cast<int>(hi - days.begin())};
}

}  // namespace

CaseWeight case_weight(const CaseSeries& cases, const DemographicsTable& demo, CountyId county,
                       Date d) {
    const DemographicsRecord* rec = demo.find(county);
    if (!rec)
        throw std::invalid_argument("county " + to_string(county) + " missing from demographics");
    return {county, d, weight_of(cases, *rec, d)};
}

double external_risk_day(const TripPanel& panel, const CaseSeries& cases,
                         const DemographicsTable& demo, CountyId j, Date d,
                         std::size_t* skipped) {
    auto di = panel.calendar().index_of(d);
    if (!di) throw std::out_of_range("date " + d.to_string() + " is not a calendar day");
    double er = 0;
    for (const TripPanel::Flow& f : panel.inbound(*di, j)) {
        const DemographicsRecord* rec = demo.find(f.origin);
        if (!rec) {
            if (skipped) ++*skipped;
            continue;
        }
        er += weight_of(cases, *rec, d) * f.trips;
    }
    return er;
}

ExternalRisk external_risk_period(const TripPanel& panel, const CaseSeries& cases,
                                  const DemographicsTable& demo, CountyId j, Date window_start,
                                  Date window_end, ErWeighting weighting) {
    auto [lo, hi] = window_day_range(panel.calendar(), window_start, window_end);
    if (lo >= hi) throw std::invalid_argument("external-risk window contains no calendar day");
    ExternalRisk out;
    out.county = j;
    out.window_start = window_start;
    out.window_end = window_end;
    std::set<CountyId> contributing;
    if (weighting == ErWeighting::daily_synchronous) {
        for (int di = lo; di < hi; ++di) {
            const Date d = panel.calendar().days()[static_cast<std::size_t>(di)];
            for (const TripPanel::Flow& f : panel.inbound(di, j)) {
                const DemographicsRecord* rec = demo.find(f.origin);
                if (!rec) {
                    ++out.skipped_origins;
                    continue;
                }
                const double term = weight_of(cases, *rec, d) * f.trips;
                out.er += term;
                if (term > 0) contributing.insert(f.origin);
            }
        }
    } else {
        // period_end: total inbound flow per origin, weighted once at the
        // window's final date.
        std::map<CountyId, double> total_inbound;
        for (int di = lo; di < hi; ++di) {
            for (const TripPanel::Flow& f : panel.inbound(di, j)) {
                if (!demo.contains(f.origin)) {
                    ++out.skipped_origins;
                    continue;
                }
                total_inbound[f.origin] += f.trips;
            }
        }
        for (const auto& [origin, trips] : total_inbound) {
            const double term = weight_of(cases, *demo.find(origin), window_end) * trips;
            out.er += term;
            if (term > 0) contributing.insert(origin);
        }
    }
    out.n_origins = static_cast<int>(contributing.size());
    return out;
}

std::vector<ExternalRisk> external_risk_grid(const TripPanel& panel, const CaseSeries& cases,
                                             const DemographicsTable& demo,
                                             std::span<const CountyId> targets, Date window_start,
                                             Date window_end, ErWeighting weighting) {
    std::vector<ExternalRisk> out(targets.size());
    const int n = static_cast<int>(targets.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = external_risk_period(
            panel, cases, demo, targets[static_cast<std::size_t>(i)], window_start, window_end,
            weighting);
    }
    return out;
}

SeveritySample severity(const CaseSeries& cases, const DemographicsTable& demo, CountyId county,
                        Date anchor, LagSpec lag) {
    const DemographicsRecord* rec = demo.find(county);
    if (!rec)
        throw std::invalid_argument("county " + to_string(county) + " missing from demographics");
    SeveritySample s;
    s.county = county;
    s.anchor = anchor;
    s.lag = lag;
    const Date target = anchor + lag.days();
    const auto end = cases.coverage_end();
    if (!end || target > *end) {
        s.available = false;
        return s;
    }
    s.available = true;
    s.severity = 1000.0 * cases.cumulative_on(county, target) / static_cast<double>(rec->population);
    return s;
}

}  // namespace flowrisk

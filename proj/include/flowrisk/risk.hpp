#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "flowrisk/calendar.hpp"
#include "flowrisk/ingest.hpp"

namespace flowrisk {

/// Origin case weight: cumulative cases per 1000 population on a given day.
struct CaseWeight {
    CountyId county;
    Date date;
    double w = 0;
};

/// How flows are weighted when external risk is aggregated over a period.
/// daily_synchronous weights each day's flows by that day's cumulative
/// cases; period_end weights the period's total flows by the weights at the
/// window's last day.
enum class ErWeighting { daily_synchronous, period_end };

/// External risk of a county over a window: inbound trips weighted by the
/// origin counties' cumulative cases per 1000, summed over the window's
/// calendar days. n_origins counts distinct origins contributing a positive
/// term anywhere in the window; skipped_origins counts (origin, day) terms
/// dropped because the origin lacks demographics.
struct ExternalRisk {
    CountyId county;
    Date window_start;
    Date window_end;
    double er = 0;
    int n_origins = 0;
    std::size_t skipped_origins = 0;
};

/// Outbreak severity: cumulative cases per 1000 population at
/// anchor + 7*lag.weeks civil days. Unavailable when that date lies past
/// the case data's coverage.
struct SeveritySample {
    CountyId county;
    Date anchor;
    LagSpec lag;
    double severity = 0;
    bool available = false;
};

/// Throws std::invalid_argument when the county lacks demographics.
CaseWeight case_weight(const CaseSeries& cases, const DemographicsTable& demo, CountyId county,
                       Date d);

/// Daily external risk of county j: sum over origins i != j, ascending
/// FIPS, of w_i(d) * E_ij(d). Origins without demographics contribute
/// nothing and are tallied into *skipped when given.
double external_risk_day(const TripPanel& panel, const CaseSeries& cases,
                         const DemographicsTable& demo, CountyId j, Date d,
                         std::size_t* skipped = nullptr);

/// Window aggregate of external risk (see ErWeighting). Throws when the
/// window misses the calendar.
ExternalRisk external_risk_period(const TripPanel& panel, const CaseSeries& cases,
                                  const DemographicsTable& demo, CountyId j, Date window_start,
                                  Date window_end,
                                  ErWeighting weighting = ErWeighting::daily_synchronous);

/// Period external risk for many targets at once. Targets are independent,
/// so the loop is parallel; each target's own summation keeps the fixed
/// ascending-origin order, so results are identical to the one-county calls.
std::vector<ExternalRisk> external_risk_grid(const TripPanel& panel, const CaseSeries& cases,
                                             const DemographicsTable& demo,
                                             std::span<const CountyId> targets, Date window_start,
                                             Date window_end,
                                             ErWeighting weighting = ErWeighting::daily_synchronous);

/// Throws std::invalid_argument when the county lacks demographics.
SeveritySample severity(const CaseSeries& cases, const DemographicsTable& demo, CountyId county,
                        Date anchor, LagSpec lag);

}  // namespace flowrisk

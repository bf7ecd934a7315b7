#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "flowrisk/calendar.hpp"
#include "flowrisk/ingest.hpp"

// Serial reference implementations, deliberately written as direct
// transcriptions of the definitions and kept independent of the indexed /
// parallel code paths in risk.cpp and stats.cpp. Tests use them as oracles;
// the bench tool compares them against the production kernels. Nothing in
// the main library or the CLI may link against this.
namespace flowrisk::reference {

/// Per-county cumulative case samples, raw: (county, date) -> cumulative.
using CaseTable = std::map<std::pair<CountyId, Date>, double>;
using PopulationTable = std::map<CountyId, std::int64_t>;

/// Cumulative cases with carry-forward semantics: the value of the latest
/// sample on or before d, else 0.
double cumulative_before_or_on(const CaseTable& cases, CountyId c, Date d);

/// ER_j(d) by direct scan of every record: sum over i != j of
/// w_i(d) * E_ij(d), with w_i = 1000 * cumulative_i(d) / population_i.
/// Origins absent from `population` contribute nothing.
double external_risk_day_brute(std::span<const TripRecord> records, const CaseTable& cases,
                               const PopulationTable& population, CountyId j, Date d);

/// Sum of the daily values over analysis days in [window_start, window_end].
double external_risk_period_brute(std::span<const TripRecord> records, const CaseTable& cases,
                                  const PopulationTable& population, CountyId j,
                                  std::span<const Date> analysis_days, Date window_start,
                                  Date window_end);

/// Pearson correlation from the raw-sums identity
/// (n*Sxy - Sx*Sy) / sqrt((n*Sxx - Sx^2)(n*Syy - Sy^2)).
std::optional<double> pearson_naive(std::span<const double> x, std::span<const double> y);

/// Spearman with O(n^2) average ranks: rank_i = #smaller + (#equal + 1)/2.
std::optional<double> spearman_naive(std::span<const double> x, std::span<const double> y);

/// Least squares through the normal equations (X^T X) b = X^T y with an
/// appended intercept column, solved by Gaussian elimination with partial
/// pivoting. Returns [b_1..b_k, intercept].
std::vector<double> ols_normal_equations(const std::vector<std::vector<double>>& columns,
                                         std::span<const double> y);

}  // namespace flowrisk::reference

#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowrisk/calendar.hpp"
#include "flowrisk/ingest.hpp"
#include "flowrisk/risk.hpp"

namespace flowrisk {

/// Thrown when a design ends up with fewer than the minimum includable rows.
struct InsufficientSampleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown on rank-deficient regression designs.
struct SingularDesignError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sample Pearson product-moment correlation. nullopt when either variable
/// has zero variance. Throws on length mismatch or n < 3.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Spearman rank correlation: Pearson applied to average ranks (ties share
/// the mean of their positions).
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

/// Average ranks (1-based; ties get the mean of the tied positions).
std::vector<double> average_ranks(std::span<const double> values);

/// Mean and sample standard deviation (n-1 denominator); the z-scoring used
/// for the income covariate everywhere.
std::pair<double, double> mean_and_sample_sd(std::span<const double> values);

/// Least-squares fit of y on the given regressor columns plus an intercept.
/// coefficients = [b_1..b_k, intercept]; r_squared = 1 - SSE/SST.
/// Solved by Householder QR; rank deficiency raises SingularDesignError,
/// an exactly constant y raises std::invalid_argument (degenerate target).
struct OlsFit {
    std::vector<double> coefficients;
    double r_squared = 0;
};

OlsFit ols_fit(const std::vector<std::vector<double>>& columns, std::span<const double> y);

/// One day of the region-outflow vs. case-severity correlation analysis.
/// `available` is false when the lag-shifted trip date precedes the
/// calendar; pearson/spearman are nullopt when degenerate (constant
/// variable or n < 3).
struct CorrelationPoint {
    Date case_date;
    LagSpec lag;
    std::optional<Date> trip_date;
    std::optional<double> pearson;
    std::optional<double> spearman;
    int n = 0;
    bool available = false;
};

/// Which counties form each day's correlation sample.
/// fixed_set_zero_fill: every county that ever receives region flow in the
/// panel, with x = 0 on days without flow (daily coefficients stay
/// comparable). positive_flow_only: only counties with positive flow on the
/// trip date.
enum class SamplePolicy { fixed_set_zero_fill, positive_flow_only };

/// Daily correlation between region->county trips on the (lag-shifted) trip
/// date and cumulative cases per 1000 on the case date. Trip dates falling
/// on weekends/holidays snap to the nearest earlier analysis day. Counties
/// without demographics are excluded from the sample.
std::vector<CorrelationPoint> lagged_correlation_series(
    const TripPanel& panel, const CaseSeries& cases, const DemographicsTable& demo,
    const RegionSpec& region, LagSpec lag, std::span<const Date> case_dates,
    SamplePolicy policy = SamplePolicy::fixed_set_zero_fill);

enum class ExclusionReason { zero_er, zero_severity, missing_demographics, severity_unavailable };

std::string_view to_string(ExclusionReason r);

/// One regression row: everything already transformed (logs taken, income
/// standardized).
struct DesignRow {
    CountyId county;
    double log10_er = 0;
    double age65 = 0;
    double male = 0;
    double african_american = 0;
    double income_std = 0;
    double log10_severity = 0;
};

struct DesignMatrix {
    std::string period_label;
    LagSpec lag;
    Date period_start;
    Date period_end;
    Date severity_anchor;  // period_end; severity evaluated at anchor + 7*lag
    std::vector<DesignRow> rows;                              // ascending county
    std::vector<std::pair<CountyId, ExclusionReason>> exclusions;  // ascending county
};

/// Assembles the double-risk design for one period x lag scenario. The
/// candidate set is every county in the demographics table plus every panel
/// county; rows with non-positive ER or severity are excluded (logs must be
/// finite), with reasons recorded. Income is z-scored over the included
/// rows. Throws InsufficientSampleError below 10 rows.
DesignMatrix build_design(const TripPanel& panel, const CaseSeries& cases,
                          const DemographicsTable& demo, Date period_start, Date period_end,
                          LagSpec lag, ErWeighting weighting = ErWeighting::daily_synchronous,
                          std::string period_label = {});

/// log10(S) = alpha*log10(ER) + b1*Age + b2*Male + b3*Afri + b4*IncomeZ + gamma.
struct DoubleRiskFit {
    std::string period_label;
    int lag_weeks = 0;
    double alpha = 0;
    std::array<double, 4> beta{};  // age65, male, african_american, income_std
    double gamma = 0;
    double r_squared = 0;
    int n = 0;
    int n_excluded = 0;
};

DoubleRiskFit fit_double_risk(const DesignMatrix& design);

/// One period x lag cell of the scenario grid; `failure` holds the reason
/// when the cell could not be fitted (insufficient sample, singular design).
struct ScenarioCell {
    std::string period_label;
    int lag_weeks = 0;
    std::optional<DoubleRiskFit> fit;
    std::string failure;
    int n_excluded = 0;
};

/// Fits every (period, lag) combination; per-cell failures are recorded,
/// never thrown.
std::vector<ScenarioCell> scenario_grid(
    const TripPanel& panel, const CaseSeries& cases, const DemographicsTable& demo,
    const std::vector<std::pair<std::string, std::pair<Date, Date>>>& periods,
    std::span<const int> lag_weeks, ErWeighting weighting = ErWeighting::daily_synchronous);

/// Importance of the logged external risk: R-squared of the full model vs.
/// the refit with the log10_er column removed (internal risk only), on the
/// same rows.
struct ImportanceResult {
    std::string period_label;
    int lag_weeks = 0;
    double r2_full = 0;
    double r2_ir_only = 0;
    double delta = 0;
};

ImportanceResult er_importance(const DesignMatrix& design);

}  // namespace flowrisk

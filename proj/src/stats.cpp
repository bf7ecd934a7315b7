#include "flowrisk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace flowrisk {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("correlation inputs differ in length");
    if (x.size() < 3) throw std::invalid_argument("correlation needs at least 3 samples");
}

}  // namespace

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0 || syy == 0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // tied block [i, j]: everyone gets the mean of positions i+1 .. j+1
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    const std::vector<double> rx = average_ranks(x);
    const std::vector<double> ry = average_ranks(y);
    return pearson(rx, ry);
}

std::pair<double, double> mean_and_sample_sd(std::span<const double> values) {
    const std::size_t n = values.size();
    double mean = 0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    if (n < 2) return {mean, 0.0};
    double var = 0;
    for (double v : values) var += (v - mean) * (v - mean);
    return {mean, std::sqrt(var / static_cast<double>(n - 1))};
}

OlsFit ols_fit(const std::vector<std::vector<double>>& columns, std::span<const double> y) {
    const std::size_t n = y.size();
    const std::size_t k = columns.size();
    for (const auto& col : columns)
        if (col.size() != n) throw std::invalid_argument("regressor column length mismatch");
    const std::size_t p = k + 1;  // + intercept
    if (n < p + 1) throw std::invalid_argument("too few samples for regression");

    // A = [columns | 1], column-major; Householder QR in place, then
    // back-substitution against Q^T y.
    std::vector<double> a(n * p);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t r = 0; r < n; ++r) a[c * n + r] = columns[c][r];
    for (std::size_t r = 0; r < n; ++r) a[k * n + r] = 1.0;
    std::vector<double> qty(y.begin(), y.end());

    double max_col_norm = 0;
    for (std::size_t c = 0; c < p; ++c) {
        double norm = 0;
        for (std::size_t r = 0; r < n; ++r) norm += a[c * n + r] * a[c * n + r];
        max_col_norm = std::max(max_col_norm, std::sqrt(norm));
    }
    const double tol = 1e-12 * std::max(1.0, max_col_norm);

    std::vector<double> v(n);
    for (std::size_t c = 0; c < p; ++c) {
        double norm = 0;
        for (std::size_t r = c; r < n; ++r) norm += a[c * n + r] * a[c * n + r];
        norm = std::sqrt(norm);
        if (norm <= tol)
            throw SingularDesignError("rank-deficient design at column " + std::to_string(c));
        const double pivot = a[c * n + c];
        const double alpha = pivot >= 0 ? -norm : norm;
        double vnorm2 = 0;
        for (std::size_t r = c; r < n; ++r) {
            v[r] = a[c * n + r];
            if (r == c) v[r] -= alpha;
            vnorm2 += v[r] * v[r];
        }
        if (vnorm2 == 0) continue;
        for (std::size_t cc = c; cc < p; ++cc) {
            double dot = 0;
            for (std::size_t r = c; r < n; ++r) dot += v[r] * a[cc * n + r];
            const double scale = 2.0 * dot / vnorm2;
            for (std::size_t r = c; r < n; ++r) a[cc * n + r] -= scale * v[r];
        }
        double dot = 0;
        for (std::size_t r = c; r < n; ++r) dot += v[r] * qty[r];
        const double scale = 2.0 * dot / vnorm2;
        for (std::size_t r = c; r < n; ++r) qty[r] -= scale * v[r];
    }

    for (std::size_t c = 0; c < p; ++c)
        if (std::abs(a[c * n + c]) <= tol)
            throw SingularDesignError("rank-deficient design at column " + std::to_string(c));

    OlsFit fit;
    fit.coefficients.assign(p, 0.0);
    for (std::size_t ci = p; ci-- > 0;) {
        double sum = qty[ci];
        for (std::size_t cj = ci + 1; cj < p; ++cj) sum -= a[cj * n + ci] * fit.coefficients[cj];
        fit.coefficients[ci] = sum / a[ci * n + ci];
    }

    double ymean = 0;
    for (double yi : y) ymean += yi;
    ymean /= static_cast<double>(n);
    double sst = 0;
    for (double yi : y) sst += (yi - ymean) * (yi - ymean);
    if (sst == 0) throw std::invalid_argument("degenerate regression target (zero variance)");
    double sse = 0;
    for (std::size_t r = 0; r < n; ++r) {
        double pred = fit.coefficients[k];
        for (std::size_t c = 0; c < k; ++c) pred += fit.coefficients[c] * columns[c][r];
        const double resid = y[r] - pred;
        sse += resid * resid;
    }
    fit.r_squared = 1.0 - sse / sst;
    return fit;
}

std::vector<CorrelationPoint> lagged_correlation_series(
    const TripPanel& panel, const CaseSeries& cases, const DemographicsTable& demo,
    const RegionSpec& region, LagSpec lag, std::span<const Date> case_dates,
    SamplePolicy policy) {
    const AnalysisCalendar& cal = panel.calendar();
    for (Date d : case_dates)
        if (!cal.contains(d))
            throw std::invalid_argument("case date " + d.to_string() + " is not a calendar day");

    // Fixed destination universe: every external county with demographics
    // that ever receives region flow in the panel.
    std::set<CountyId> universe_set;
    for (std::size_t di = 0; di < cal.size(); ++di) {
        for (CountyId member : region.members()) {
            panel.for_each_outbound(static_cast<int>(di), member, [&](const TripPanel::Flow& f) {
                if (f.trips > 0 && !region.contains(f.destination) && demo.contains(f.destination))
                    universe_set.insert(f.destination);
            });
        }
    }
    const std::vector<CountyId> universe(universe_set.begin(), universe_set.end());

    std::vector<CorrelationPoint> out(case_dates.size());
    const int n_points = static_cast<int>(case_dates.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (int pi = 0; pi < n_points; ++pi) {
        const Date case_date = case_dates[static_cast<std::size_t>(pi)];
        CorrelationPoint& point = out[static_cast<std::size_t>(pi)];
        point.case_date = case_date;
        point.lag = lag;
        const auto trip_date = cal.analysis_day_on_or_before(case_date - lag.days());
        if (!trip_date) {
            point.available = false;
            continue;
        }
        point.available = true;
        point.trip_date = *trip_date;
        const int tdi = *cal.index_of(*trip_date);

        std::map<CountyId, double> flow;
        for (CountyId member : region.members()) {
            panel.for_each_outbound(tdi, member, [&](const TripPanel::Flow& f) {
                if (!region.contains(f.destination) && demo.contains(f.destination))
                    flow[f.destination] += f.trips;
            });
        }

        std::vector<double> x, y;
        auto push_county = [&](CountyId c, double trips) {
            x.push_back(trips);
            y.push_back(1000.0 * cases.cumulative_on(c, case_date) /
                        static_cast<double>(demo.find(c)->population));
        };
        if (policy == SamplePolicy::fixed_set_zero_fill) {
            for (CountyId c : universe) {
                auto it = flow.find(c);
                push_county(c, it == flow.end() ? 0.0 : it->second);
            }
        } else {
            for (const auto& [c, trips] : flow)
                if (trips > 0) push_county(c, trips);
        }
        point.n = static_cast<int>(x.size());
        if (point.n < 3) continue;
        point.pearson = pearson(x, y);
        point.spearman = spearman(x, y);
    }
    return out;
}

std::string_view to_string(ExclusionReason r) {
    switch (r) {
        case ExclusionReason::zero_er: return "zero_er";
        case ExclusionReason::zero_severity: return "zero_severity";
        case ExclusionReason::missing_demographics: return "missing_demographics";
        case ExclusionReason::severity_unavailable: return "severity_unavailable";
    }
    return "?";
}

DesignMatrix build_design(const TripPanel& panel, const CaseSeries& cases,
                          const DemographicsTable& demo, Date period_start, Date period_end,
                          LagSpec lag, ErWeighting weighting, std::string period_label) {
    DesignMatrix design;
    design.period_label = std::move(period_label);
    design.lag = lag;
    design.period_start = period_start;
    design.period_end = period_end;
    design.severity_anchor = period_end;

    // candidate counties: demographics union panel
    std::set<CountyId> candidates;
    for (const DemographicsRecord& r : demo.records()) candidates.insert(r.county);
    for (CountyId c : panel.counties()) candidates.insert(c);
    std::vector<CountyId> with_demo;
    for (CountyId c : candidates) {
        if (demo.contains(c))
            with_demo.push_back(c);
        else
            design.exclusions.emplace_back(c, ExclusionReason::missing_demographics);
    }

    const std::vector<ExternalRisk> ers =
        external_risk_grid(panel, cases, demo, with_demo, period_start, period_end, weighting);

    struct Pending {
        CountyId county;
        double er;
        double severity;
    };
    std::vector<Pending> pending;
    for (std::size_t i = 0; i < with_demo.size(); ++i) {
        const CountyId c = with_demo[i];
        const SeveritySample s = severity(cases, demo, c, design.severity_anchor, lag);
        if (!s.available) {
            design.exclusions.emplace_back(c, ExclusionReason::severity_unavailable);
            continue;
        }
        if (ers[i].er <= 0) {
            design.exclusions.emplace_back(c, ExclusionReason::zero_er);
            continue;
        }
        if (s.severity <= 0) {
            design.exclusions.emplace_back(c, ExclusionReason::zero_severity);
            continue;
        }
        pending.push_back({c, ers[i].er, s.severity});
    }
    std::sort(design.exclusions.begin(), design.exclusions.end());

    if (pending.size() < 10)
        throw InsufficientSampleError("only " + std::to_string(pending.size()) +
                                      " includable rows (need 10)");

    // income z-score over the included rows
    std::vector<double> incomes;
    incomes.reserve(pending.size());
    for (const Pending& p : pending) incomes.push_back(demo.find(p.county)->median_income);
    const auto [mean, sd] = mean_and_sample_sd(incomes);

    design.rows.reserve(pending.size());
    for (const Pending& p : pending) {
        const DemographicsRecord* rec = demo.find(p.county);
        DesignRow row;
        row.county = p.county;
        row.log10_er = std::log10(p.er);
        row.age65 = rec->pct_age65;
        row.male = rec->pct_male;
        row.african_american = rec->pct_african_american;
        row.income_std = sd > 0 ? (rec->median_income - mean) / sd : 0.0;
        row.log10_severity = std::log10(p.severity);
        design.rows.push_back(row);
    }
    return design;
}

namespace {

std::vector<std::vector<double>> design_columns(const DesignMatrix& design, bool include_er) {
    std::vector<std::vector<double>> cols;
    const std::size_t n = design.rows.size();
    auto col_of = [&](auto member) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = design.rows[i].*member;
        return col;
    };
    if (include_er) cols.push_back(col_of(&DesignRow::log10_er));
    cols.push_back(col_of(&DesignRow::age65));
    cols.push_back(col_of(&DesignRow::male));
    cols.push_back(col_of(&DesignRow::african_american));
    cols.push_back(col_of(&DesignRow::income_std));
    return cols;
}

std::vector<double> target_column(const DesignMatrix& design) {
    std::vector<double> y(design.rows.size());
    for (std::size_t i = 0; i < design.rows.size(); ++i) y[i] = design.rows[i].log10_severity;
    return y;
}

}  // namespace

DoubleRiskFit fit_double_risk(const DesignMatrix& design) {
    const OlsFit fit = ols_fit(design_columns(design, true), target_column(design));
    DoubleRiskFit out;
    out.period_label = design.period_label;
    out.lag_weeks = design.lag.weeks;
    out.alpha = fit.coefficients[0];
    out.beta = {fit.coefficients[1], fit.coefficients[2], fit.coefficients[3],
                fit.coefficients[4]};
    out.gamma = fit.coefficients[5];
    out.r_squared = fit.r_squared;
    out.n = static_cast<int>(design.rows.size());
    out.n_excluded = static_cast<int>(design.exclusions.size());
    return out;
}

std::vector<ScenarioCell> scenario_grid(
    const TripPanel& panel, const CaseSeries& cases, const DemographicsTable& demo,
    const std::vector<std::pair<std::string, std::pair<Date, Date>>>& periods,
    std::span<const int> lag_weeks, ErWeighting weighting) {
    std::vector<ScenarioCell> cells;
    for (const auto& [label, range] : periods) {
        for (int weeks : lag_weeks) {
            ScenarioCell cell;
            cell.period_label = label;
            cell.lag_weeks = weeks;
            try {
                const DesignMatrix design = build_design(panel, cases, demo, range.first,
                                                         range.second, LagSpec{weeks}, weighting,
                                                         label);
                cell.n_excluded = static_cast<int>(design.exclusions.size());
                cell.fit = fit_double_risk(design);
            } catch (const std::exception& e) {
                cell.failure = e.what();
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

ImportanceResult er_importance(const DesignMatrix& design) {
    const OlsFit full = ols_fit(design_columns(design, true), target_column(design));
    const OlsFit ir_only = ols_fit(design_columns(design, false), target_column(design));
    ImportanceResult out;
    out.period_label = design.period_label;
    out.lag_weeks = design.lag.weeks;
    out.r2_full = full.r_squared;
    out.r2_ir_only = ir_only.r_squared;
    out.delta = full.r_squared - ir_only.r_squared;
    return out;
}

}  // namespace flowrisk

#include "flowrisk/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace flowrisk::reference {

double cumulative_before_or_on(const CaseTable& cases, CountyId c, Date d) {
    double value = 0;
    for (const auto& [key, cum] : cases) {
        if (key.first != c) continue;
        if (key.second <= d) value = cum;  // map is date-ordered within a county
    }
    return value;
}

double external_risk_day_brute(std::span<const TripRecord> records, const CaseTable& cases,
                               const PopulationTable& population, CountyId j, Date d) {
    double er = 0;
    for (const TripRecord& r : records) {
        if (r.date != d || !(r.destination == j) || r.origin == j) continue;
        auto pop = population.find(r.origin);
        if (pop == population.end()) continue;
        const double w =
            1000.0 * cumulative_before_or_on(cases, r.origin, d) / static_cast<double>(pop->second);
        er += w * r.trips;
    }
    return er;
}

double external_risk_period_brute(std::span<const TripRecord> records, const CaseTable& cases,
                                  const PopulationTable& population, CountyId j,
                                  std::span<const Date> analysis_days, Date window_start,
                                  Date window_end) {
    double er = 0;
    for (Date d : analysis_days)
        if (d >= window_start && d <= window_end)
            er += external_risk_day_brute(records, cases, population, j, d);
    return er;
}

std::optional<double> pearson_naive(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("pearson_naive: bad input sizes");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    const double vx = n * sxx - sx * sx;
    const double vy = n * syy - sy * sy;
    if (vx <= 0 || vy <= 0) return std::nullopt;
    return (n * sxy - sx * sy) / std::sqrt(vx * vy);
}

std::optional<double> spearman_naive(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("spearman_naive: bad input sizes");
    auto ranks = [](std::span<const double> v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::size_t smaller = 0, equal = 0;
            for (std::size_t j = 0; j < v.size(); ++j) {
                if (v[j] < v[i]) ++smaller;
                if (v[j] == v[i]) ++equal;
            }
            r[i] = static_cast<double>(smaller) + (static_cast<double>(equal) + 1.0) / 2.0;
        }
        return r;
    };
    const std::vector<double> rx = ranks(x);
    const std::vector<double> ry = ranks(y);
    return pearson_naive(rx, ry);
}

std::vector<double> ols_normal_equations(const std::vector<std::vector<double>>& columns,
                                         std::span<const double> y) {
    const std::size_t n = y.size();
    const std::size_t p = columns.size() + 1;
    auto column = [&](std::size_t c, std::size_t r) -> double {
        return c + 1 < p ? columns[c][r] : 1.0;
    };
    // G = X^T X, rhs = X^T y
    std::vector<std::vector<double>> g(p, std::vector<double>(p, 0.0));
    std::vector<double> rhs(p, 0.0);
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b)
            for (std::size_t r = 0; r < n; ++r) g[a][b] += column(a, r) * column(b, r);
        for (std::size_t r = 0; r < n; ++r) rhs[a] += column(a, r) * y[r];
    }
    // Gaussian elimination, partial pivoting
    for (std::size_t c = 0; c < p; ++c) {
        std::size_t pivot = c;
        for (std::size_t r = c + 1; r < p; ++r)
            if (std::abs(g[r][c]) > std::abs(g[pivot][c])) pivot = r;
        if (g[pivot][c] == 0) throw std::runtime_error("normal equations singular");
        std::swap(g[c], g[pivot]);
        std::swap(rhs[c], rhs[pivot]);
        for (std::size_t r = c + 1; r < p; ++r) {
            const double factor = g[r][c] / g[c][c];
            for (std::size_t cc = c; cc < p; ++cc) g[r][cc] -= factor * g[c][cc];
            rhs[r] -= factor * rhs[c];
        }
    }
    std::vector<double> beta(p, 0.0);
    for (std::size_t c = p; c-- > 0;) {
        double sum = rhs[c];
        for (std::size_t cc = c + 1; cc < p; ++cc) sum -= g[c][cc] * beta[cc];
        beta[c] = sum / g[c][c];
    }
    return beta;
}

}  // namespace flowrisk::reference

// Compares the parallel kernels against the serial reference
// implementations on a mid-sized synthetic world: wall time plus the
// largest relative disagreement (which should sit at rounding noise).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "flowrisk/mobility.hpp"
#include "flowrisk/reference.hpp"
#include "flowrisk/risk.hpp"
#include "flowrisk/stats.hpp"
#include "flowrisk/synth.hpp"

using namespace flowrisk;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel_diff(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif

    // kept modest: the serial ER reference rescans every record per query
    const AnalysisCalendar calendar =
        build_calendar(Date::from_ymd(2020, 3, 2), Date::from_ymd(2020, 4, 10));
    SyntheticWorld world = SyntheticWorld::make(60, 7, GravityParams{}, EpiParams{});
    world.epi.seed_county = world.counties.front().id;
    const TripPanel panel = gravity_flows(world, calendar);
    const CaseSeries cases = simulate_epidemic(world, panel, calendar);
    const DemographicsTable demo = world.demographics();
    std::printf("world: %zu counties, %zu days, %zu flow records\n", world.counties.size(),
                calendar.size(), panel.record_count());

    // --- external risk over a period ---
    std::vector<CountyId> targets;
    for (const SyntheticCounty& c : world.counties) targets.push_back(c.id);
    const Date ws = Date::from_ymd(2020, 3, 9), we = Date::from_ymd(2020, 4, 10);

    auto t0 = std::chrono::steady_clock::now();
    const auto grid = external_risk_grid(panel, cases, demo, targets, ws, we);
    const double t_parallel = seconds_since(t0);

    const std::vector<TripRecord> records = panel.to_records();
    reference::CaseTable case_table;
    reference::PopulationTable pops;
    for (const auto& [county, track] : cases.tracks()) {
        Date d = track.first;
        for (double v : track.cumulative) {
            case_table[{county, d}] = v;
            ++d;
        }
    }
    for (const DemographicsRecord& r : demo.records()) pops[r.county] = r.population;

    t0 = std::chrono::steady_clock::now();
    double worst = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double brute = reference::external_risk_period_brute(
            records, case_table, pops, targets[i], calendar.days(), ws, we);
        worst = std::max(worst, rel_diff(brute, grid[i].er));
    }
    const double t_brute = seconds_since(t0);
    std::printf("external_risk_period  kernel %.3fs  serial reference %.3fs  (%.1fx)  max rel diff %.2e\n",
                t_parallel, t_brute, t_brute / t_parallel, worst);

    // --- daily correlation series ---
    const RegionSpec region("epicenter", {world.epi.seed_county});
    std::vector<Date> case_dates(calendar.days().begin() + 20, calendar.days().end());

    t0 = std::chrono::steady_clock::now();
    const auto points = lagged_correlation_series(panel, cases, demo, region, LagSpec{1}, case_dates);
    const double t_corr = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    worst = 0;
    for (const CorrelationPoint& pt : points) {
        if (!pt.available || !pt.pearson) continue;
        // rebuild the day's sample naively
        std::vector<double> x, y;
        const int tdi = *calendar.index_of(*pt.trip_date);
        std::map<CountyId, double> flow;
        panel.for_each_outbound(tdi, world.epi.seed_county, [&](const TripPanel::Flow& f) {
            flow[f.destination] += f.trips;
        });
        for (const SyntheticCounty& c : world.counties) {
            if (c.id == world.epi.seed_county) continue;
            bool ever = false;
            for (std::size_t di = 0; di < calendar.size() && !ever; ++di)
                panel.for_each_outbound(static_cast<int>(di), world.epi.seed_county,
                                        [&](const TripPanel::Flow& f) {
                                            if (f.destination == c.id && f.trips > 0) ever = true;
                                        });
            if (!ever) continue;
            auto it = flow.find(c.id);
            x.push_back(it == flow.end() ? 0.0 : it->second);
            y.push_back(1000.0 *
                        reference::cumulative_before_or_on(case_table, c.id, pt.case_date) /
                        static_cast<double>(c.population));
        }
        const auto naive = reference::pearson_naive(x, y);
        if (naive) worst = std::max(worst, rel_diff(*naive, *pt.pearson));
    }
    const double t_corr_ref = seconds_since(t0);
    std::printf("correlation_series    kernel %.3fs  serial reference %.3fs  (%.1fx)  max rel diff %.2e\n",
                t_corr, t_corr_ref, t_corr_ref / t_corr, worst);

    // --- OLS ---
    SeededRng rng(99);
    const std::size_t n = 20000, k = 5;
    std::vector<std::vector<double>> cols(k, std::vector<double>(n));
    std::vector<double> y(n);
    for (std::size_t r = 0; r < n; ++r) {
        double target = 1.0;
        for (std::size_t c = 0; c < k; ++c) {
            cols[c][r] = rng.uniform(-2, 2);
            target += (static_cast<double>(c) + 0.5) * cols[c][r];
        }
        y[r] = target + rng.normal(0, 0.1);
    }
    t0 = std::chrono::steady_clock::now();
    const OlsFit qr = ols_fit(cols, y);
    const double t_qr = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    const std::vector<double> ne = reference::ols_normal_equations(cols, y);
    const double t_ne = seconds_since(t0);
    worst = 0;
    for (std::size_t c = 0; c < qr.coefficients.size(); ++c)
        worst = std::max(worst, rel_diff(qr.coefficients[c], ne[c]));
    std::printf("ols_fit               QR %.3fs      normal equations %.3fs  max rel diff %.2e\n",
                t_qr, t_ne, worst);
    return 0;
}

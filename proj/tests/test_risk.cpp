#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flowrisk/reference.hpp"
#include "flowrisk/risk.hpp"
#include "flowrisk/synth.hpp"

using namespace flowrisk;

namespace {

Date d(int y, int m, int day) { return Date::from_ymd(y, m, day); }

const AnalysisCalendar kCal = build_calendar(d(2020, 3, 2), d(2020, 3, 13));

constexpr CountyId A{10001}, B{10002}, C{10003};

DemographicsTable demo3() {
    return DemographicsTable({{A, 1000, 15, 49, 10, 50000},
                              {B, 2000, 18, 50, 20, 60000},
                              {C, 4000, 12, 48, 5, 70000}});
}

CaseSeries cases_of(std::map<CountyId, std::vector<std::pair<Date, double>>> samples) {
    return CaseSeries::from_samples(std::move(samples));
}

}  // namespace

TEST_CASE("case weight") {
    const auto demo = demo3();
    SUBCASE("hand arithmetic") {
        const auto cases = cases_of({{A, {{d(2020, 3, 2), 10}}}, {B, {{d(2020, 3, 2), 4}}}});
        CHECK(case_weight(cases, demo, A, d(2020, 3, 2)).w == 10.0);   // 10/1000*1000
        CHECK(case_weight(cases, demo, B, d(2020, 3, 2)).w == 2.0);    // 4/2000*1000
        CHECK(case_weight(cases, demo, C, d(2020, 3, 2)).w == 0.0);    // no reports
    }
    SUBCASE("zero before the first report") {
        const auto cases = cases_of({{A, {{d(2020, 3, 5), 10}}}});
        CHECK(case_weight(cases, demo, A, d(2020, 3, 2)).w == 0.0);
    }
    SUBCASE("missing demographics throws") {
        const auto cases = cases_of({{A, {{d(2020, 3, 2), 10}}}});
        CHECK_THROWS_AS(case_weight(cases, demo, CountyId{99999}, d(2020, 3, 2)),
                        std::invalid_argument);
    }
}

TEST_CASE("external risk, daily") {
    const auto demo = demo3();
    // w_A = 10, w_B = 1 on Mar 2
    const auto cases = cases_of({{A, {{d(2020, 3, 2), 10}}}, {B, {{d(2020, 3, 2), 2}}}});
    SUBCASE("hand evaluation") {
        const TripPanel panel(kCal,
                              {{d(2020, 3, 2), A, C, 100}, {d(2020, 3, 2), B, C, 50}});
        CHECK(external_risk_day(panel, cases, demo, C, d(2020, 3, 2)) == 1050.0);
    }
    SUBCASE("all origin weights zero") {
        const auto quiet = cases_of({});
        const TripPanel panel(kCal, {{d(2020, 3, 2), A, C, 100}});
        CHECK(external_risk_day(panel, quiet, demo, C, d(2020, 3, 2)) == 0.0);
    }
    SUBCASE("no inbound flows") {
        const TripPanel panel(kCal, {{d(2020, 3, 2), C, A, 9}});
        CHECK(external_risk_day(panel, cases, demo, C, d(2020, 3, 2)) == 0.0);
    }
    SUBCASE("origins missing demographics are skipped and counted") {
        const TripPanel panel(kCal, {{d(2020, 3, 2), A, C, 100},
                                     {d(2020, 3, 2), CountyId{77777}, C, 1000}});
        std::size_t skipped = 0;
        CHECK(external_risk_day(panel, cases, demo, C, d(2020, 3, 2), &skipped) == 1000.0);
        CHECK(skipped == 1);
    }
}

TEST_CASE("external risk over a period") {
    const auto demo = demo3();
    const auto cases = cases_of({{A, {{d(2020, 3, 2), 10}}}, {B, {{d(2020, 3, 2), 2}}}});
    const TripPanel panel(kCal, {{d(2020, 3, 2), A, C, 100},
                                 {d(2020, 3, 2), B, C, 50},
                                 {d(2020, 3, 3), A, C, 100},
                                 {d(2020, 3, 3), B, C, 50}});
    SUBCASE("daily values add up") {
        const ExternalRisk er =
            external_risk_period(panel, cases, demo, C, d(2020, 3, 2), d(2020, 3, 3));
        CHECK(er.er == 2100.0);
        CHECK(er.n_origins == 2);
    }
    SUBCASE("single-day window equals the daily value") {
        const ExternalRisk er =
            external_risk_period(panel, cases, demo, C, d(2020, 3, 2), d(2020, 3, 2));
        CHECK(er.er == external_risk_day(panel, cases, demo, C, d(2020, 3, 2)));
    }
    SUBCASE("pre-outbreak window is zero") {
        const auto quiet = cases_of({});
        const ExternalRisk er =
            external_risk_period(panel, quiet, demo, C, d(2020, 3, 2), d(2020, 3, 3));
        CHECK(er.er == 0.0);
        CHECK(er.n_origins == 0);
    }
    SUBCASE("window outside the calendar throws") {
        CHECK_THROWS_AS(
            external_risk_period(panel, cases, demo, C, d(2020, 4, 1), d(2020, 4, 2)),
            std::invalid_argument);
    }
    SUBCASE("period additivity over disjoint windows") {
        const double whole =
            external_risk_period(panel, cases, demo, C, d(2020, 3, 2), d(2020, 3, 13)).er;
        const double first =
            external_risk_period(panel, cases, demo, C, d(2020, 3, 2), d(2020, 3, 6)).er;
        const double second =
            external_risk_period(panel, cases, demo, C, d(2020, 3, 9), d(2020, 3, 13)).er;
        CHECK(whole == doctest::Approx(first + second).epsilon(1e-15));
    }
    SUBCASE("period_end weighting uses final-day weights against total flows") {
        // weights double on Mar 3: w_A 10 -> 20
        const auto growing =
            cases_of({{A, {{d(2020, 3, 2), 10}, {d(2020, 3, 3), 20}}}});
        const ExternalRisk er = external_risk_period(panel, growing, demo, C, d(2020, 3, 2),
                                                     d(2020, 3, 3), ErWeighting::period_end);
        CHECK(er.er == 20.0 * 200.0);  // w_A(end) * total A->C flow
        const ExternalRisk sync = external_risk_period(panel, growing, demo, C, d(2020, 3, 2),
                                                       d(2020, 3, 3));
        CHECK(sync.er == 10.0 * 100 + 20.0 * 100);
    }
}

TEST_CASE("external risk linearity and monotonicity") {
    const auto demo = demo3();
    const auto cases = cases_of({{A, {{d(2020, 3, 2), 10}}}, {B, {{d(2020, 3, 2), 2}}}});
    std::vector<TripRecord> records{{d(2020, 3, 2), A, C, 100}, {d(2020, 3, 2), B, C, 50}};
    const double base =
        external_risk_period(TripPanel(kCal, records), cases, demo, C, kCal.start(), kCal.end()).er;

    SUBCASE("scaling flows scales ER") {
        auto scaled = records;
        for (auto& r : scaled) r.trips *= 3.5;
        const double er =
            external_risk_period(TripPanel(kCal, scaled), cases, demo, C, kCal.start(), kCal.end())
                .er;
        CHECK(er == doctest::Approx(3.5 * base).epsilon(1e-14));
    }
    SUBCASE("scaling cases scales ER") {
        const auto scaled = cases_of({{A, {{d(2020, 3, 2), 25}}}, {B, {{d(2020, 3, 2), 5}}}});
        const double er =
            external_risk_period(TripPanel(kCal, records), scaled, demo, C, kCal.start(),
                                 kCal.end())
                .er;
        CHECK(er == doctest::Approx(2.5 * base).epsilon(1e-14));
    }
    SUBCASE("adding a positive-weight inbound flow strictly increases ER") {
        auto more = records;
        more.push_back({d(2020, 3, 3), A, C, 1});
        const double er =
            external_risk_period(TripPanel(kCal, more), cases, demo, C, kCal.start(), kCal.end())
                .er;
        CHECK(er > base);
    }
    SUBCASE("a county's own outbreak never feeds its own ER") {
        // C is the only infected county; no self-loops exist, so ER_C = 0
        const auto only_c = cases_of({{C, {{d(2020, 3, 2), 500}}}});
        const TripPanel panel(kCal, {{d(2020, 3, 2), C, A, 100}, {d(2020, 3, 2), C, B, 100},
                                     {d(2020, 3, 2), A, C, 100}});
        CHECK(external_risk_period(panel, only_c, demo, C, kCal.start(), kCal.end()).er == 0.0);
    }
}

TEST_CASE("severity") {
    const auto demo = demo3();
    const auto cases = cases_of({{B, {{d(2020, 3, 2), 1}, {d(2020, 3, 9), 4}}}});
    SUBCASE("one-week lag hand case") {
        const SeveritySample s = severity(cases, demo, B, d(2020, 3, 2), LagSpec{1});
        REQUIRE(s.available);
        CHECK(s.severity == 2.0);  // 4 cases / 2000 * 1000
    }
    SUBCASE("zero lag reads the anchor itself") {
        const SeveritySample s = severity(cases, demo, B, d(2020, 3, 2), LagSpec{0});
        REQUIRE(s.available);
        CHECK(s.severity == 0.5);
    }
    SUBCASE("beyond coverage is unavailable") {
        const SeveritySample s = severity(cases, demo, B, d(2020, 3, 2), LagSpec{3});
        CHECK_FALSE(s.available);
    }
    SUBCASE("lag offset is civil days, not analysis days") {
        // Mar 2 + 7 civil days = Mar 9 (the next Monday), even though only
        // 5 analysis days separate them.
        const auto growing = cases_of({{B, {{d(2020, 3, 6), 2}, {d(2020, 3, 9), 4}}}});
        const SeveritySample s = severity(growing, demo, B, d(2020, 3, 2), LagSpec{1});
        REQUIRE(s.available);
        CHECK(s.severity == 2.0);
    }
    SUBCASE("missing demographics throws") {
        CHECK_THROWS_AS(severity(cases, demo, CountyId{99999}, d(2020, 3, 2), LagSpec{0}),
                        std::invalid_argument);
    }
}

TEST_CASE("grid kernel matches per-county calls and the brute-force oracle") {
    // seeded random small worlds, checked against the serial reference
    SeededRng rng(2024);
    for (int trial = 0; trial < 10; ++trial) {
        const int n_counties = 3 + static_cast<int>(rng.next_u64() % 8);
        SyntheticWorld world = SyntheticWorld::make(n_counties, rng.next_u64());
        const AnalysisCalendar cal = build_calendar(d(2020, 3, 2), d(2020, 3, 10));
        // sparse random flows, random case ramps
        std::vector<TripRecord> records;
        for (Date day : cal.days())
            for (const auto& o : world.counties)
                for (const auto& t : world.counties) {
                    if (o.id == t.id) continue;
                    if (rng.uniform01() < 0.4)
                        records.push_back({day, o.id, t.id, std::floor(rng.uniform(0, 500))});
                }
        const TripPanel panel(cal, records);
        std::map<CountyId, std::vector<std::pair<Date, double>>> samples;
        for (const auto& c : world.counties) {
            if (rng.uniform01() < 0.3) continue;  // some counties report nothing
            std::vector<std::pair<Date, double>> rows;
            double cum = 0;
            for (Date day = cal.start(); day <= cal.end(); day = day + 2) {
                cum += std::floor(rng.uniform(0, 20));
                rows.emplace_back(day, cum);
            }
            samples[c.id] = rows;
        }
        const CaseSeries cases = CaseSeries::from_samples(samples);
        const DemographicsTable demo = world.demographics();

        reference::CaseTable case_table;
        for (const auto& [county, rows] : samples)
            for (const auto& [day, cum] : rows) case_table[{county, day}] = cum;
        reference::PopulationTable pops;
        for (const auto& r : demo.records()) pops[r.county] = r.population;

        std::vector<CountyId> targets;
        for (const auto& c : world.counties) targets.push_back(c.id);
        const Date ws = cal.days()[1], we = cal.days()[cal.size() - 2];
        const auto grid = external_risk_grid(panel, cases, demo, targets, ws, we);
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const ExternalRisk solo =
                external_risk_period(panel, cases, demo, targets[i], ws, we);
            CHECK(grid[i].er == solo.er);  // bit-identical, independent of thread count
            const double brute = reference::external_risk_period_brute(
                panel.to_records(), case_table, pops, targets[i], cal.days(), ws, we);
            CHECK(grid[i].er ==
                  doctest::Approx(brute).epsilon(1e-12));
        }
    }
}

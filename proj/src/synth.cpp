#include "flowrisk/synth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include "flowrisk/stats.hpp"

namespace flowrisk {

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("inverse_normal_cdf needs p in (0,1)");
    // Acklam's rational approximation.
    static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                    -2.759285104469687e+02, 1.383577518672690e+02,
                                    -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                    -1.556989798598866e+02, 6.680131188771972e+01,
                                    -1.328068155288572e+01};
    static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                    -2.400758277161838e+00, -2.549732539343734e+00,
                                    4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                    2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double plow = 0.02425;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

double SeededRng::normal(double mu, double sigma) {
    // strictly inside (0,1): offset the 53-bit mantissa by half a step
    const double u = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    return mu + sigma * inverse_normal_cdf(u);
}

SyntheticWorld SyntheticWorld::make(int n_counties, std::uint64_t seed, GravityParams gravity,
                                    EpiParams epi) {
    if (n_counties < 2) throw std::invalid_argument("synthetic world needs at least 2 counties");
    SyntheticWorld world;
    world.seed = seed;
    world.gravity = std::move(gravity);
    world.epi = epi;
    SeededRng rng(seed);
    world.counties.reserve(static_cast<std::size_t>(n_counties));
    for (int i = 0; i < n_counties; ++i) {
        SyntheticCounty c;
        c.id = CountyId{static_cast<std::uint32_t>(10001 + i)};
        c.population = static_cast<std::int64_t>(std::llround(std::pow(10.0, rng.uniform(4.0, 5.7))));
        c.cx = rng.uniform(0.0, 100.0);
        c.cy = rng.uniform(0.0, 100.0);
        c.pct_age65 = rng.uniform(8.0, 25.0);
        c.pct_male = rng.uniform(48.0, 52.0);
        c.pct_african_american = rng.uniform(0.0, 40.0);
        c.median_income = rng.uniform(35000.0, 90000.0);
        world.counties.push_back(c);
    }
    if (world.epi.seed_county.fips == 0) world.epi.seed_county = world.counties.front().id;
    return world;
}

const SyntheticCounty* SyntheticWorld::find(CountyId c) const {
    auto it = std::lower_bound(counties.begin(), counties.end(), c,
                               [](const SyntheticCounty& sc, CountyId id) { return sc.id < id; });
    if (it == counties.end() || it->id != c) return nullptr;
    return &*it;
}

DemographicsTable SyntheticWorld::demographics() const {
    std::vector<DemographicsRecord> records;
    records.reserve(counties.size());
    for (const SyntheticCounty& c : counties)
        records.push_back({c.id, c.population, c.pct_age65, c.pct_male, c.pct_african_american,
                           c.median_income});
    return DemographicsTable(std::move(records));
}

TripPanel gravity_flows(const SyntheticWorld& world, const AnalysisCalendar& calendar) {
    const std::size_t n = world.counties.size();
    if (n < 2) throw std::invalid_argument("gravity model needs at least 2 counties");
    const GravityParams& g = world.gravity;

    // pairwise kernel P_i^a * P_j^b / dist^c, reused for every day
    std::vector<double> base(n * n, 0.0);
    // exceptions cannot cross the parallel region, so coincident centroids
    // are flagged and reported afterwards
    std::atomic<int> coincident{-1};
#pragma omp parallel for schedule(static)
    for (int ii = 0; ii < static_cast<int>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const SyntheticCounty& ci = world.counties[i];
        const double pi_a = std::pow(static_cast<double>(ci.population), g.pop_exponent_origin);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const SyntheticCounty& cj = world.counties[j];
            const double dx = ci.cx - cj.cx;
            const double dy = ci.cy - cj.cy;
            const double dist = std::sqrt(dx * dx + dy * dy);
            if (dist == 0 && g.distance_exponent > 0) {
                coincident.store(ii, std::memory_order_relaxed);
                continue;
            }
            const double pj_b = std::pow(static_cast<double>(cj.population), g.pop_exponent_dest);
            base[i * n + j] =
                g.k * pi_a * pj_b / (g.distance_exponent > 0 ? std::pow(dist, g.distance_exponent) : 1.0);
        }
    }
    if (coincident.load() >= 0)
        throw std::invalid_argument("county " +
                                    to_string(world.counties[static_cast<std::size_t>(coincident.load())].id) +
                                    " shares a centroid with another county");

    std::vector<TripRecord> records;
    records.reserve(calendar.size() * n * (n - 1));
    for (Date d : calendar.days()) {
        auto it = g.daily_multipliers.find(d);
        const double mult = it == g.daily_multipliers.end() ? 1.0 : it->second;
        if (mult <= 0) throw std::invalid_argument("daily multiplier must be positive");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j)
                    records.push_back({d, world.counties[i].id, world.counties[j].id,
                                       mult * base[i * n + j]});
    }
    return TripPanel(calendar, std::move(records));
}

CaseSeries simulate_epidemic(const SyntheticWorld& world, const TripPanel& panel,
                             const AnalysisCalendar& calendar) {
    const std::size_t n = world.counties.size();
    const EpiParams& e = world.epi;
    if (e.beta_internal < 0 || e.import_coefficient < 0)
        throw std::invalid_argument("transmission rates must be non-negative");
    if (e.recovery_rate <= 0 || e.recovery_rate > 1)
        throw std::invalid_argument("recovery rate must be in (0,1]");
    if (e.reporting_fraction <= 0 || e.reporting_fraction > 1)
        throw std::invalid_argument("reporting fraction must be in (0,1]");
    if (e.seed_cases < 1) throw std::invalid_argument("seed cases must be positive");
    const SyntheticCounty* seed = world.find(e.seed_county);
    if (!seed) throw std::invalid_argument("seed county not in world");

    std::vector<double> susceptible(n), infectious(n, 0.0), cumulative(n, 0.0);
    std::map<CountyId, std::size_t> county_index;
    for (std::size_t i = 0; i < n; ++i) {
        susceptible[i] = static_cast<double>(world.counties[i].population);
        county_index[world.counties[i].id] = i;
    }
    {
        const std::size_t si = county_index.at(e.seed_county);
        const double seeded = std::min<double>(e.seed_cases, susceptible[si]);
        susceptible[si] -= seeded;
        infectious[si] = seeded;
        cumulative[si] = seeded;
    }

    std::map<CountyId, std::vector<std::pair<Date, double>>> samples;
    auto record_day = [&](Date d) {
        for (std::size_t i = 0; i < n; ++i)
            samples[world.counties[i].id].emplace_back(
                d, std::floor(e.reporting_fraction * cumulative[i]));
    };

    std::vector<double> new_inf(n), import_force(n);
    Date next_emit = calendar.start();
    for (std::size_t di = 0; di < calendar.size(); ++di) {
        const Date day = calendar.days()[di];
        // emit carried-forward values for skipped civil days
        while (next_emit < day) {
            record_day(next_emit);
            ++next_emit;
        }
        std::fill(import_force.begin(), import_force.end(), 0.0);
        for (const TripPanel::Flow& f : panel.day_flows(static_cast<int>(di))) {
            auto oi = county_index.find(f.origin);
            auto dj = county_index.find(f.destination);
            if (oi == county_index.end() || dj == county_index.end()) continue;
            const double pop_i = static_cast<double>(world.counties[oi->second].population);
            import_force[dj->second] += f.trips * infectious[oi->second] / pop_i;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double pop = static_cast<double>(world.counties[i].population);
            const double force = e.beta_internal * susceptible[i] * infectious[i] / pop +
                                 e.import_coefficient * import_force[i];
            new_inf[i] = std::min(susceptible[i], force);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double recovered_today = e.recovery_rate * infectious[i];
            susceptible[i] -= new_inf[i];
            infectious[i] += new_inf[i] - recovered_today;
            cumulative[i] += new_inf[i];
        }
        record_day(day);
        next_emit = day + 1;
    }
    // carry through the calendar tail (weekend/holiday at the end)
    while (next_emit <= calendar.end()) {
        record_day(next_emit);
        ++next_emit;
    }
    return CaseSeries::from_samples(std::move(samples));
}

CaseSeries generate_loglinear(const SyntheticWorld& world, const TripPanel& panel,
                              Date period_start, Date period_end, LagSpec lag, double true_alpha,
                              std::array<double, 4> true_beta, double true_gamma,
                              double noise_sigma) {
    if (noise_sigma < 0) throw std::invalid_argument("noise sigma must be >= 0");
    const CountyId origin = world.epi.seed_county;
    if (!world.find(origin)) throw std::invalid_argument("bootstrap origin not in world");
    const Date anchor = period_end;
    const Date severity_date = anchor + lag.days();
    const Date cal_start = panel.calendar().start();

    // pass 1: bootstrap weights w(d) = 0.1 * (1 + days since calendar start)
    const double origin_pop = static_cast<double>(world.find(origin)->population);
    auto bootstrap_cumulative = [&](Date d) {
        return 0.1 * (1.0 + static_cast<double>(d - cal_start)) * origin_pop / 1000.0;
    };
    std::map<CountyId, std::vector<std::pair<Date, double>>> samples;
    {
        auto& rows = samples[origin];
        for (Date d = cal_start; d <= severity_date; ++d)
            rows.emplace_back(d, bootstrap_cumulative(d));
    }
    const CaseSeries bootstrap = CaseSeries::from_samples(samples);

    // pass 2: period ER for every target under the bootstrap weights
    std::vector<CountyId> targets;
    for (const SyntheticCounty& c : world.counties)
        if (c.id != origin) targets.push_back(c.id);
    const DemographicsTable demo = world.demographics();
    const std::vector<ExternalRisk> ers = external_risk_grid(
        panel, bootstrap, demo, targets, period_start, period_end, ErWeighting::daily_synchronous);

    std::vector<double> incomes;
    incomes.reserve(targets.size());
    for (CountyId c : targets) incomes.push_back(world.find(c)->median_income);
    const auto [income_mean, income_sd] = mean_and_sample_sd(incomes);

    // noise stream: one draw per target, ascending FIPS
    SeededRng noise(world.seed ^ 0x9e3779b97f4a7c15ULL);

    for (std::size_t t = 0; t < targets.size(); ++t) {
        const CountyId c = targets[t];
        if (ers[t].er <= 0)
            throw std::runtime_error("log-linear construction: county " + to_string(c) +
                                     " has non-positive external risk over the period");
        const SyntheticCounty* sc = world.find(c);
        const double income_z = income_sd > 0 ? (sc->median_income - income_mean) / income_sd : 0.0;
        const double eps = noise_sigma > 0 ? noise.normal(0.0, noise_sigma) : 0.0;
        const double log_sev = true_alpha * std::log10(ers[t].er) + true_beta[0] * sc->pct_age65 +
                               true_beta[1] * sc->pct_male +
                               true_beta[2] * sc->pct_african_american +
                               true_beta[3] * income_z + true_gamma + eps;
        const double target_cum =
            std::pow(10.0, log_sev) * static_cast<double>(sc->population) / 1000.0;

        auto& rows = samples[c];
        if (severity_date == cal_start) {
            rows.emplace_back(severity_date, target_cum);
            continue;
        }
        rows.emplace_back(cal_start, 0.0);
        const int ramp_days = severity_date - period_end;
        if (ramp_days > 0) {
            for (int s = 1; s <= ramp_days; ++s)
                rows.emplace_back(period_end + s, target_cum * s / ramp_days);
        } else {
            // no-lag scenario: the severity value lands on the period end
            rows.emplace_back(severity_date, target_cum);
        }
    }
    return CaseSeries::from_samples(std::move(samples));
}

}  // namespace flowrisk

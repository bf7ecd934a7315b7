#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "flowrisk/calendar.hpp"
#include "flowrisk/ingest.hpp"

namespace flowrisk {

/// Reproducible random source: a std::mt19937_64 engine (bit-exact by
/// standard across platforms) mapped to doubles by taking the top 53 bits.
/// Normal deviates come from the inverse normal CDF (Acklam's rational
/// approximation), never from std::normal_distribution, whose output is
/// implementation-defined. One value consumed per draw; consumption order
/// is documented at each call site that matters.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via inverse CDF of a strictly-in-(0,1) uniform.
    double normal(double mu = 0, double sigma = 1);

private:
    std::mt19937_64 engine_;
};

/// Inverse of the standard normal CDF (Acklam's approximation,
/// |relative error| < 1.2e-9). Throws outside (0, 1).
double inverse_normal_cdf(double p);

/// Gravity flow generator parameters:
/// E_ij(d) = multiplier(d) * k * P_i^a * P_j^b / dist(i,j)^c, for i != j.
/// Dates absent from daily_multipliers use 1.0.
struct GravityParams {
    double k = 1e-3;
    double pop_exponent_origin = 1.0;   // a
    double pop_exponent_dest = 1.0;     // b
    double distance_exponent = 2.0;     // c, >= 0
    std::map<Date, double> daily_multipliers;
};

/// Deterministic metapopulation S-I-R parameters.
struct EpiParams {
    double beta_internal = 0.3;
    double import_coefficient = 0.05;
    double recovery_rate = 0.2;          // in (0, 1]
    CountyId seed_county;
    int seed_cases = 10;
    double reporting_fraction = 1.0;     // in (0, 1]
};

struct SyntheticCounty {
    CountyId id;
    std::int64_t population = 0;
    double cx = 0, cy = 0;  // centroid
    double pct_age65 = 0;
    double pct_male = 0;
    double pct_african_american = 0;
    double median_income = 0;
};

/// A fully seeded synthetic world. Identical (counties, seed, params)
/// regenerate byte-identical flows and case series.
struct SyntheticWorld {
    std::vector<SyntheticCounty> counties;  // ascending id
    std::uint64_t seed = 0;
    GravityParams gravity;
    EpiParams epi;

    /// Draws n counties from the seed. Per county, the stream is consumed
    /// in the order: population, cx, cy, pct_age65, pct_male,
    /// pct_african_american, median_income. FIPS ids are 10001, 10002, ...
    /// The epidemic seed county defaults to the first county.
    static SyntheticWorld make(int n_counties, std::uint64_t seed, GravityParams gravity = {},
                               EpiParams epi = {});

    const SyntheticCounty* find(CountyId c) const;
    DemographicsTable demographics() const;
};

/// Dense gravity flows over the calendar. Throws when two counties share a
/// centroid and the distance exponent is positive.
TripPanel gravity_flows(const SyntheticWorld& world, const AnalysisCalendar& calendar);

/// Deterministic (expected-value) discrete-day S-I-R over the county
/// network, one step per calendar day:
///   new_inf_j = min(S_j, beta*S_j*I_j/P_j + import * sum_i E_ij(d)*I_i/P_i)
/// Recovered compartment is P - S - I by construction, so S+I+R = P holds
/// exactly. Reported cumulative cases are
/// floor(reporting_fraction * cumulative infections), emitted on a daily
/// civil grid spanning the calendar.
CaseSeries simulate_epidemic(const SyntheticWorld& world, const TripPanel& panel,
                             const AnalysisCalendar& calendar);

/// Constructs a case series for which the log-linear double-risk model
/// holds by construction over the given period and lag:
///
///   pass 1: the world's epi.seed_county gets a fixed linearly growing
///           bootstrap case series, so every origin weight is known;
///   pass 2: every other county's ER over the period is evaluated under
///           those bootstrap weights (daily-synchronous), and its
///           cumulative cases at period_end + 7*lag are set to
///           population/1000 * 10^(alpha*log10 ER + beta.x + gamma + eps),
///           eps ~ Normal(0, noise_sigma) drawn per county in ascending
///           FIPS order from a stream seeded with world.seed.
///
/// The income covariate enters as a z-score over the target counties, the
/// same standardization the regression applies. Dates between period end
/// and the severity date ramp linearly from 0; only the severity-date value
/// is contractual. Throws when any target county's ER is not positive.
CaseSeries generate_loglinear(const SyntheticWorld& world, const TripPanel& panel,
                              Date period_start, Date period_end, LagSpec lag, double true_alpha,
                              std::array<double, 4> true_beta, double true_gamma,
                              double noise_sigma);

}  // namespace flowrisk

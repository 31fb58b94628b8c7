#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "relrisk/counterfactual.hpp"
#include "relrisk/measures.hpp"
#include "relrisk/risk.hpp"

namespace relrisk {

// The four switch mechanisms. A switch carrier responds to treatment as the
// pattern dictates; non-carriers follow the background process alone, so
// treatment has no effect on them.
enum class SwitchPattern {
    sufficient_causal,      // treatment suffices to produce the outcome
    necessary_preventive,   // untreated carriers get the outcome regardless
    sufficient_preventive,  // treatment suffices to block the outcome
    necessary_causal,       // carriers escape the outcome unless treated
};

std::string_view switch_pattern_id(SwitchPattern p) noexcept;  // "sufficient-causal", ...
std::optional<SwitchPattern> parse_switch_pattern(std::string_view id) noexcept;

// q is the prevalence of the switch, r the rate of the background
// outcome-generating process; the two indicators are independent.
struct SwitchModel {
    SwitchPattern pattern;
    double q = 0.0;
    double r = 0.0;
};

struct PotentialOutcomePair {
    bool y0;
    bool y1;
};

// Boolean semantics of each mechanism given the two indicators.
PotentialOutcomePair potential_outcomes(SwitchPattern pattern, bool background,
                                        bool has_switch) noexcept;

// Closed-form counterfactual risks of the model.
RiskPair exact_risks(const SwitchModel& m);

// Inverts exact_risks for the switch prevalence. Throws
// Error{errc::inconsistent_pattern} when the observed direction of effect
// contradicts the asserted pattern (the recovered q would leave [0,1]).
double recover_prevalence(SwitchPattern pattern, RiskPair rp);

// Which ratio stays constant across subgroups that share q, and whether the
// constancy is on the reciprocal of that ratio.
struct StableScale {
    Scale scale;
    bool reciprocal;
};
StableScale stable_scale(SwitchPattern pattern) noexcept;

// One sweep row per baseline risk; cells where a measure is undefined are
// recorded as empty rather than aborting the sweep.
struct SweepRow {
    double r = 0.0;
    double p0 = 0.0;
    double p1 = 0.0;
    std::optional<double> rr;
    std::optional<double> sr;
    std::optional<double> rd;
    std::optional<double> odds;
    std::optional<double> grrr_value;
    std::optional<double> stable_value;
};

std::vector<SweepRow> stability_sweep(SwitchPattern pattern, double q,
                                      std::span<const double> baseline_risks);

struct SimulatedCohort {
    PopulationCounts counts;
    std::uint64_t seed = 0;
    std::int64_t n = 0;
};

// Draws n independent (background, switch) pairs and classifies the implied
// potential outcomes. Identical (m, n, seed) yields identical counts.
SimulatedCohort simulate_cohort(const SwitchModel& m, std::int64_t n, std::uint64_t seed);

// Randomizes treatment over the cohort's individuals (laid out sorted by
// response type) and reveals the corresponding potential outcome.
TwoByTwoTable observed_table(const SimulatedCohort& c, double treat_probability,
                             std::uint64_t seed);

}  // namespace relrisk

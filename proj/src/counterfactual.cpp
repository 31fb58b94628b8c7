#include "relrisk/counterfactual.hpp"

#include <cmath>
#include <stdexcept>

#include "relrisk/error.hpp"
#include "relrisk/measures.hpp"

namespace relrisk {

namespace {

void check_distribution(const ResponseTypeDistribution& d) {
    detail::check_probability(d.doomed, "doomed");
    detail::check_probability(d.causal, "causal");
    detail::check_probability(d.preventive, "preventive");
    detail::check_probability(d.immune, "immune");
    const double sum = d.doomed + d.causal + d.preventive + d.immune;
    if (std::fabs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("response type proportions must sum to 1");
    }
}

}  // namespace

RiskPair marginal_risks(const ResponseTypeDistribution& d) {
    check_distribution(d);
    // Pair sums can overshoot 1 by the validation tolerance; cap them so the
    // result is a valid risk pair.
    const double p0 = std::min(1.0, d.doomed + d.preventive);
    const double p1 = std::min(1.0, d.doomed + d.causal);
    return {p0, p1};
}

bool monotonicity_check(const ResponseTypeDistribution& d, Monotonicity direction) {
    check_distribution(d);
    return direction == Monotonicity::no_causation ? d.causal == 0.0 : d.preventive == 0.0;
}

double proportion_prevented(const ResponseTypeDistribution& d) {
    if (!monotonicity_check(d, Monotonicity::no_causation)) {
        throw Error(errc::monotonicity_violated,
                    "prevented fraction needs a population with no causal types");
    }
    const RiskPair rp = marginal_risks(d);
    if (rp.p0 == 0.0) {
        throw Error(errc::undefined_measure, "no one would get the outcome untreated");
    }
    // With causal = 0 this is preventive/(doomed + preventive); routing it
    // through the ratio code path keeps equality with 1 - RR bit for bit.
    return relative_risk_reduction(rp).value;
}

double proportion_harmed(const ResponseTypeDistribution& d) {
    if (!monotonicity_check(d, Monotonicity::no_prevention)) {
        throw Error(errc::monotonicity_violated,
                    "harmed fraction needs a population with no preventive types");
    }
    const RiskPair rp = marginal_risks(d);
    if (rp.p0 == 1.0) {
        throw Error(errc::undefined_measure, "no one would escape the outcome untreated");
    }
    // With preventive = 0 this is causal/(causal + immune), the complement
    // margin's mirror of the prevented fraction.
    return relative_survival_reduction(rp).value;
}

ResponseTypeDistribution enumerate_population(const PopulationCounts& c) {
    if (c.n_doomed < 0 || c.n_causal < 0 || c.n_preventive < 0 || c.n_immune < 0) {
        throw std::invalid_argument("population counts must be nonnegative");
    }
    const std::int64_t total = c.total();
    if (total == 0) {
        throw Error(errc::empty_population, "cannot take proportions of an empty population");
    }
    const double n = static_cast<double>(total);
    return {static_cast<double>(c.n_doomed) / n, static_cast<double>(c.n_causal) / n,
            static_cast<double>(c.n_preventive) / n, static_cast<double>(c.n_immune) / n};
}

}  // namespace relrisk

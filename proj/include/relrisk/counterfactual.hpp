#pragma once

#include <cstdint>

#include "relrisk/risk.hpp"

namespace relrisk {

// Joint distribution of the two potential outcomes (Y^0, Y^1):
//   doomed     (1,1)  outcome either way
//   causal     (0,1)  outcome only if treated
//   preventive (1,0)  outcome only if untreated
//   immune     (0,0)  outcome never
// Proportions must sum to 1.
struct ResponseTypeDistribution {
    double doomed = 0.0;
    double causal = 0.0;
    double preventive = 0.0;
    double immune = 0.0;
};

enum class ResponseType { doomed, causal, preventive, immune };

constexpr ResponseType classify_response(bool y0, bool y1) noexcept {
    if (y0 && y1) return ResponseType::doomed;
    if (!y0 && y1) return ResponseType::causal;
    if (y0 && !y1) return ResponseType::preventive;
    return ResponseType::immune;
}

struct PopulationCounts {
    std::int64_t n_doomed = 0;
    std::int64_t n_causal = 0;
    std::int64_t n_preventive = 0;
    std::int64_t n_immune = 0;

    std::int64_t total() const noexcept {
        return n_doomed + n_causal + n_preventive + n_immune;
    }
};

// Monotonicity assumptions: no_causation forbids causal types (treatment
// never hurts), no_prevention forbids preventive types (treatment never
// helps). Holding means the forbidden proportion is exactly zero.
enum class Monotonicity { no_causation, no_prevention };

// Marginal risks implied by the joint distribution:
//   p0 = doomed + preventive, p1 = doomed + causal.
RiskPair marginal_risks(const ResponseTypeDistribution& d);

bool monotonicity_check(const ResponseTypeDistribution& d, Monotonicity direction);

// Fraction of those fated to the outcome untreated whom treatment saves:
// preventive / (doomed + preventive). Under no_causation this equals
// 1 - RR of the marginal risks; requires monotonicity, a nonzero
// denominator, and throws otherwise.
double proportion_prevented(const ResponseTypeDistribution& d);

// Fraction of those fated to escape untreated whom treatment harms:
// causal / (causal + immune). Under no_prevention this equals 1 - SR of
// the marginal risks; same preconditions on the opposite margin.
double proportion_harmed(const ResponseTypeDistribution& d);

// Empirical distribution of a finite population given per-type counts.
// Throws Error{errc::empty_population} when all counts are zero.
ResponseTypeDistribution enumerate_population(const PopulationCounts& c);

}  // namespace relrisk

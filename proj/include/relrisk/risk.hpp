#pragma once

#include <cstdint>

namespace relrisk {

// Pair of counterfactual risks: p0 under no treatment, p1 under treatment.
struct RiskPair {
    double p0 = 0.0;
    double p1 = 0.0;
};

// Exposure-by-outcome counts. a1/a0 = treated/untreated, y1/y0 = event/none.
struct TwoByTwoTable {
    std::int64_t a1_y1 = 0;
    std::int64_t a1_y0 = 0;
    std::int64_t a0_y1 = 0;
    std::int64_t a0_y0 = 0;

    std::int64_t treated_total() const noexcept { return a1_y1 + a1_y0; }
    std::int64_t untreated_total() const noexcept { return a0_y1 + a0_y0; }
};

struct ConfidenceInterval {
    double low = 0.0;
    double high = 0.0;
    double level = 0.95;
};

namespace detail {

// All throw std::invalid_argument on violation.
void check_probability(double p, const char* name);
void check_risk_pair(const RiskPair& rp);
void check_table(const TwoByTwoTable& t);

}  // namespace detail

}  // namespace relrisk

#pragma once

#include <optional>
#include <string_view>

#include "relrisk/risk.hpp"

namespace relrisk {

// Effect-measure scales. Short ids (as accepted by parse_scale and the
// command line): rr, sr, rd, or, rrr, rsr, switch, grrr.
enum class Scale {
    risk_ratio,
    survival_ratio,
    risk_difference,
    odds_ratio,
    relative_risk_reduction,
    relative_survival_reduction,
    switch_selected,
    grrr,
};

std::string_view scale_id(Scale s) noexcept;
std::string_view scale_name(Scale s) noexcept;
std::optional<Scale> parse_scale(std::string_view id) noexcept;

struct MeasureValue {
    Scale scale;
    double value;
    // Set only for switch_selected: the ratio the switch rule picked.
    std::optional<Scale> selected;
};

// Ratio and difference measures. Each validates its inputs and throws
// Error{errc::undefined_measure} at the boundary baselines where the
// measure has no value (0/0 or division by zero).
MeasureValue risk_ratio(RiskPair rp);                   // p1 / p0
MeasureValue survival_ratio(RiskPair rp);               // (1 - p1) / (1 - p0)
MeasureValue risk_difference(RiskPair rp);              // p1 - p0
MeasureValue odds_ratio(RiskPair rp);                   // odds(p1) / odds(p0)
MeasureValue relative_risk_reduction(RiskPair rp);      // 1 - RR
MeasureValue relative_survival_reduction(RiskPair rp);  // 1 - SR

// Named forms that coincide with the two relative reductions: Abbott's
// correction for natural mortality equals the relative survival reduction,
// and causal-power attributions equal the relative reduction on the scale
// matching the direction of action. Shared code paths keep the aliases
// exactly equal, not merely close.
MeasureValue abbott_formula(RiskPair rp);

enum class ChengDirection { generative, preventive };
MeasureValue cheng_power(RiskPair rp, ChengDirection direction);

// Switch rule: report the ratio on the scale that stays bounded, i.e. the
// risk ratio when treatment does not increase risk and the survival ratio
// when it does. Ties report the risk ratio.
MeasureValue switch_select(RiskPair rp);

// Signed generalized relative risk reduction on [-1, 1]: 1 - p1/p0 when
// treatment reduces risk, -(1 - (1-p1)/(1-p0)) when it increases risk.
// Positive values mean benefit. Inputs are canonicalized through the
// double-complement map so that swapping outcome labels negates the value
// bit for bit.
MeasureValue grrr(RiskPair rp);

// Invert a measure at a new baseline risk: the treated risk implied by
// holding the measure's value fixed at baseline p0. Throws NotClosedError
// when the implied risk leaves [0,1] (rr, sr, rd, or rrr, rsr can all
// escape); switch_selected and grrr are closed by construction.
double apply_measure(double p0, const MeasureValue& m);

// Relabel the outcome as its complement: risks become survival odds of the
// opposite event, so (p0, p1) -> (1-p0, 1-p1).
RiskPair swap_outcome_labels(RiskPair rp);

// Crude risks from a 2x2 table. Throws Error{errc::empty_margin} if either
// exposure arm is empty.
RiskPair estimate_risks(const TwoByTwoTable& t);

// Large-sample Wald interval on the log scale for rr, sr, or odds_ratio.
// Throws Error{errc::zero_cell} when a cell required by the variance
// formula is zero.
ConfidenceInterval wald_ci(const TwoByTwoTable& t, Scale scale, double level = 0.95);

}  // namespace relrisk

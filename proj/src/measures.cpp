#include "relrisk/measures.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

#include "relrisk/error.hpp"

namespace relrisk {

namespace detail {

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument(std::string(name) + " must be a probability in [0,1]");
    }
}

void check_risk_pair(const RiskPair& rp) {
    check_probability(rp.p0, "p0");
    check_probability(rp.p1, "p1");
}

void check_table(const TwoByTwoTable& t) {
    if (t.a1_y1 < 0 || t.a1_y0 < 0 || t.a0_y1 < 0 || t.a0_y0 < 0) {
        throw std::invalid_argument("table counts must be nonnegative");
    }
}

}  // namespace detail

std::string_view scale_id(Scale s) noexcept {
    switch (s) {
        case Scale::risk_ratio: return "rr";
        case Scale::survival_ratio: return "sr";
        case Scale::risk_difference: return "rd";
        case Scale::odds_ratio: return "or";
        case Scale::relative_risk_reduction: return "rrr";
        case Scale::relative_survival_reduction: return "rsr";
        case Scale::switch_selected: return "switch";
        case Scale::grrr: return "grrr";
    }
    return "?";
}

std::string_view scale_name(Scale s) noexcept {
    switch (s) {
        case Scale::risk_ratio: return "risk ratio";
        case Scale::survival_ratio: return "survival ratio";
        case Scale::risk_difference: return "risk difference";
        case Scale::odds_ratio: return "odds ratio";
        case Scale::relative_risk_reduction: return "relative risk reduction";
        case Scale::relative_survival_reduction: return "relative survival reduction";
        case Scale::switch_selected: return "switch relative risk";
        case Scale::grrr: return "generalized relative risk reduction";
    }
    return "?";
}

std::optional<Scale> parse_scale(std::string_view id) noexcept {
    if (id == "rr") return Scale::risk_ratio;
    if (id == "sr") return Scale::survival_ratio;
    if (id == "rd") return Scale::risk_difference;
    if (id == "or") return Scale::odds_ratio;
    if (id == "rrr") return Scale::relative_risk_reduction;
    if (id == "rsr") return Scale::relative_survival_reduction;
    if (id == "switch") return Scale::switch_selected;
    if (id == "grrr") return Scale::grrr;
    return std::nullopt;
}

MeasureValue risk_ratio(RiskPair rp) {
    detail::check_risk_pair(rp);
    if (rp.p0 == 0.0) {
        throw Error(errc::undefined_measure, "risk ratio needs a nonzero untreated risk");
    }
    return {Scale::risk_ratio, rp.p1 / rp.p0, std::nullopt};
}

MeasureValue survival_ratio(RiskPair rp) {
    detail::check_risk_pair(rp);
    if (rp.p0 == 1.0) {
        throw Error(errc::undefined_measure, "survival ratio needs a nonzero untreated survival");
    }
    return {Scale::survival_ratio, (1.0 - rp.p1) / (1.0 - rp.p0), std::nullopt};
}

MeasureValue risk_difference(RiskPair rp) {
    detail::check_risk_pair(rp);
    return {Scale::risk_difference, rp.p1 - rp.p0, std::nullopt};
}

MeasureValue odds_ratio(RiskPair rp) {
    detail::check_risk_pair(rp);
    if (rp.p0 == 0.0 || rp.p0 == 1.0 || rp.p1 == 1.0) {
        throw Error(errc::undefined_measure, "odds ratio needs both odds finite and nonzero");
    }
    return {Scale::odds_ratio, (rp.p1 / (1.0 - rp.p1)) / (rp.p0 / (1.0 - rp.p0)), std::nullopt};
}

// The two relative reductions are literally 1 minus the corresponding ratio
// so that the complement identities hold bit for bit.
MeasureValue relative_risk_reduction(RiskPair rp) {
    MeasureValue rr = risk_ratio(rp);
    return {Scale::relative_risk_reduction, 1.0 - rr.value, std::nullopt};
}

MeasureValue relative_survival_reduction(RiskPair rp) {
    MeasureValue sr = survival_ratio(rp);
    return {Scale::relative_survival_reduction, 1.0 - sr.value, std::nullopt};
}

MeasureValue abbott_formula(RiskPair rp) {
    return relative_survival_reduction(rp);
}

MeasureValue cheng_power(RiskPair rp, ChengDirection direction) {
    return direction == ChengDirection::generative ? relative_survival_reduction(rp)
                                                   : relative_risk_reduction(rp);
}

MeasureValue switch_select(RiskPair rp) {
    detail::check_risk_pair(rp);
    if (rp.p1 <= rp.p0) {
        MeasureValue rr = risk_ratio(rp);
        return {Scale::switch_selected, rr.value, Scale::risk_ratio};
    }
    MeasureValue sr = survival_ratio(rp);
    return {Scale::switch_selected, sr.value, Scale::survival_ratio};
}

MeasureValue grrr(RiskPair rp) {
    detail::check_risk_pair(rp);
    // Snap both inputs through the double-complement map. On its range,
    // x -> 1-x is an exact involution (Sterbenz), so evaluating the harm
    // branch as the negated benefit formula on the complemented pair makes
    // label-swap antisymmetry hold bit for bit, at a perturbation of at
    // most ~1e-15 relative to the raw formulas.
    double a = 1.0 - (1.0 - rp.p0);
    double b = 1.0 - (1.0 - rp.p1);
    if (b <= a) {
        if (a == 0.0) {
            throw Error(errc::undefined_measure,
                        "relative risk reduction needs a nonzero untreated risk");
        }
        return {Scale::grrr, 1.0 - b / a, std::nullopt};
    }
    double sa = 1.0 - a;
    double sb = 1.0 - b;
    return {Scale::grrr, -(1.0 - sb / sa), std::nullopt};
}

namespace {

[[noreturn]] void throw_not_closed(double implied) {
    throw NotClosedError(implied, "implied treated risk " + std::to_string(implied) +
                                      " falls outside [0,1]");
}

double require_in_unit(double implied) {
    if (implied < 0.0 || implied > 1.0) throw_not_closed(implied);
    return implied;
}

}  // namespace

double apply_measure(double p0, const MeasureValue& m) {
    detail::check_probability(p0, "p0");
    const double v = m.value;
    switch (m.scale) {
        case Scale::risk_ratio: {
            if (!(v >= 0.0)) throw std::invalid_argument("risk ratio value must be >= 0");
            if (p0 == 0.0) {
                throw Error(errc::undefined_measure, "risk ratio cannot move a zero baseline");
            }
            return require_in_unit(v * p0);
        }
        case Scale::survival_ratio: {
            if (!(v >= 0.0)) throw std::invalid_argument("survival ratio value must be >= 0");
            if (p0 == 1.0) {
                throw Error(errc::undefined_measure, "survival ratio cannot move a unit baseline");
            }
            return require_in_unit(1.0 - v * (1.0 - p0));
        }
        case Scale::risk_difference: {
            if (!(v >= -1.0 && v <= 1.0)) {
                throw std::invalid_argument("risk difference value must be in [-1,1]");
            }
            return require_in_unit(p0 + v);
        }
        case Scale::odds_ratio: {
            if (!(v >= 0.0)) throw std::invalid_argument("odds ratio value must be >= 0");
            if (p0 == 0.0 || p0 == 1.0) {
                throw Error(errc::undefined_measure, "odds ratio needs a baseline odds in (0,inf)");
            }
            double t = v * (p0 / (1.0 - p0));
            if (std::isinf(t)) return 1.0;
            return t / (1.0 + t);
        }
        case Scale::relative_risk_reduction: {
            if (!(v <= 1.0)) throw std::invalid_argument("relative risk reduction value must be <= 1");
            if (p0 == 0.0) {
                throw Error(errc::undefined_measure, "risk ratio cannot move a zero baseline");
            }
            return require_in_unit(p0 * (1.0 - v));
        }
        case Scale::relative_survival_reduction: {
            if (!(v <= 1.0)) {
                throw std::invalid_argument("relative survival reduction value must be <= 1");
            }
            if (p0 == 1.0) {
                throw Error(errc::undefined_measure, "survival ratio cannot move a unit baseline");
            }
            return require_in_unit(1.0 - (1.0 - p0) * (1.0 - v));
        }
        case Scale::switch_selected: {
            if (!m.selected.has_value()) {
                throw std::invalid_argument("switch value needs the selected ratio scale");
            }
            if (!(v >= 0.0 && v <= 1.0)) {
                throw std::invalid_argument("switch value must be in [0,1]");
            }
            if (*m.selected == Scale::risk_ratio) {
                if (p0 == 0.0) {
                    throw Error(errc::undefined_measure, "risk ratio cannot move a zero baseline");
                }
                return v * p0;
            }
            if (*m.selected == Scale::survival_ratio) {
                if (p0 == 1.0) {
                    throw Error(errc::undefined_measure,
                                "survival ratio cannot move a unit baseline");
                }
                return 1.0 - v * (1.0 - p0);
            }
            throw std::invalid_argument("switch selection must be the risk or survival ratio");
        }
        case Scale::grrr: {
            if (!(v >= -1.0 && v <= 1.0)) {
                throw std::invalid_argument("grrr value must be in [-1,1]");
            }
            // Total on [0,1] x [-1,1]; both branch inversions stay inside
            // the unit interval by construction.
            if (v >= 0.0) return p0 * (1.0 - v);
            return 1.0 - (1.0 + v) * (1.0 - p0);
        }
    }
    throw std::invalid_argument("unknown scale");
}

RiskPair swap_outcome_labels(RiskPair rp) {
    detail::check_risk_pair(rp);
    return {1.0 - rp.p0, 1.0 - rp.p1};
}

RiskPair estimate_risks(const TwoByTwoTable& t) {
    detail::check_table(t);
    const std::int64_t n1 = t.treated_total();
    const std::int64_t n0 = t.untreated_total();
    if (n1 == 0 || n0 == 0) {
        throw Error(errc::empty_margin, "both exposure arms need at least one individual");
    }
    return {static_cast<double>(t.a0_y1) / static_cast<double>(n0),
            static_cast<double>(t.a1_y1) / static_cast<double>(n1)};
}

ConfidenceInterval wald_ci(const TwoByTwoTable& t, Scale scale, double level) {
    detail::check_table(t);
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("confidence level must be in (0,1)");
    }
    const double a = static_cast<double>(t.a1_y1);
    const double b = static_cast<double>(t.a1_y0);
    const double c = static_cast<double>(t.a0_y1);
    const double d = static_cast<double>(t.a0_y0);
    const double n1 = a + b;
    const double n0 = c + d;

    double point = 0.0;
    double se2 = 0.0;
    switch (scale) {
        case Scale::risk_ratio:
            if (t.a1_y1 == 0 || t.a0_y1 == 0) {
                throw Error(errc::zero_cell, "risk ratio interval needs both event cells > 0");
            }
            point = (a / n1) / (c / n0);
            se2 = 1.0 / a - 1.0 / n1 + 1.0 / c - 1.0 / n0;
            break;
        case Scale::survival_ratio:
            if (t.a1_y0 == 0 || t.a0_y0 == 0) {
                throw Error(errc::zero_cell,
                            "survival ratio interval needs both non-event cells > 0");
            }
            point = (b / n1) / (d / n0);
            se2 = 1.0 / b - 1.0 / n1 + 1.0 / d - 1.0 / n0;
            break;
        case Scale::odds_ratio:
            if (t.a1_y1 == 0 || t.a1_y0 == 0 || t.a0_y1 == 0 || t.a0_y0 == 0) {
                throw Error(errc::zero_cell, "odds ratio interval needs all four cells > 0");
            }
            point = (a / b) / (c / d);
            se2 = 1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d;
            break;
        default:
            throw std::invalid_argument(
                "intervals are available for rr, sr, and or only");
    }

    boost::math::normal_distribution<double> standard_normal;
    const double z = boost::math::quantile(standard_normal, 0.5 * (1.0 + level));
    const double half_width = z * std::sqrt(se2);
    const double log_point = std::log(point);
    return {std::exp(log_point - half_width), std::exp(log_point + half_width), level};
}

}  // namespace relrisk

#include "relrisk/switchmodel.hpp"

#include <stdexcept>
#include <string>

#include "relrisk/error.hpp"
#include "relrisk/rng.hpp"

namespace relrisk {

std::string_view switch_pattern_id(SwitchPattern p) noexcept {
    switch (p) {
        case SwitchPattern::sufficient_causal: return "sufficient-causal";
        case SwitchPattern::necessary_preventive: return "necessary-preventive";
        case SwitchPattern::sufficient_preventive: return "sufficient-preventive";
        case SwitchPattern::necessary_causal: return "necessary-causal";
    }
    return "?";
}

std::optional<SwitchPattern> parse_switch_pattern(std::string_view id) noexcept {
    if (id == "sufficient-causal") return SwitchPattern::sufficient_causal;
    if (id == "necessary-preventive") return SwitchPattern::necessary_preventive;
    if (id == "sufficient-preventive") return SwitchPattern::sufficient_preventive;
    if (id == "necessary-causal") return SwitchPattern::necessary_causal;
    return std::nullopt;
}

PotentialOutcomePair potential_outcomes(SwitchPattern pattern, bool background,
                                        bool has_switch) noexcept {
    switch (pattern) {
        case SwitchPattern::sufficient_causal:
            return {background, background || has_switch};
        case SwitchPattern::necessary_preventive:
            return {background || has_switch, background};
        case SwitchPattern::sufficient_preventive:
            return {background, background && !has_switch};
        case SwitchPattern::necessary_causal:
            return {background && !has_switch, background};
    }
    return {background, background};
}

RiskPair exact_risks(const SwitchModel& m) {
    detail::check_probability(m.q, "q");
    detail::check_probability(m.r, "r");
    const double q = m.q;
    const double r = m.r;
    switch (m.pattern) {
        case SwitchPattern::sufficient_causal:
            return {r, r + q * (1.0 - r)};
        case SwitchPattern::necessary_preventive:
            return {r + q * (1.0 - r), r};
        case SwitchPattern::sufficient_preventive:
            return {r, r * (1.0 - q)};
        case SwitchPattern::necessary_causal:
            return {r * (1.0 - q), r};
    }
    return {r, r};
}

double recover_prevalence(SwitchPattern pattern, RiskPair rp) {
    detail::check_risk_pair(rp);
    double q = 0.0;
    switch (pattern) {
        case SwitchPattern::sufficient_causal:
            if (rp.p0 == 1.0) {
                throw Error(errc::undefined_measure,
                            "untreated survival is zero; prevalence unrecoverable");
            }
            q = 1.0 - (1.0 - rp.p1) / (1.0 - rp.p0);
            break;
        case SwitchPattern::necessary_preventive:
            if (rp.p1 == 1.0) {
                throw Error(errc::undefined_measure,
                            "treated survival is zero; prevalence unrecoverable");
            }
            q = 1.0 - (1.0 - rp.p0) / (1.0 - rp.p1);
            break;
        case SwitchPattern::sufficient_preventive:
            if (rp.p0 == 0.0) {
                throw Error(errc::undefined_measure,
                            "untreated risk is zero; prevalence unrecoverable");
            }
            q = 1.0 - rp.p1 / rp.p0;
            break;
        case SwitchPattern::necessary_causal:
            if (rp.p1 == 0.0) {
                throw Error(errc::undefined_measure,
                            "treated risk is zero; prevalence unrecoverable");
            }
            q = 1.0 - rp.p0 / rp.p1;
            break;
    }
    if (!(q >= 0.0 && q <= 1.0)) {
        throw Error(errc::inconsistent_pattern,
                    "observed direction of effect contradicts the asserted pattern (q = " +
                        std::to_string(q) + ")");
    }
    return q;
}

StableScale stable_scale(SwitchPattern pattern) noexcept {
    switch (pattern) {
        case SwitchPattern::sufficient_causal: return {Scale::survival_ratio, false};
        case SwitchPattern::necessary_preventive: return {Scale::survival_ratio, true};
        case SwitchPattern::sufficient_preventive: return {Scale::risk_ratio, false};
        case SwitchPattern::necessary_causal: return {Scale::risk_ratio, true};
    }
    return {Scale::risk_ratio, false};
}

namespace {

template <typename F>
std::optional<double> cell(F&& compute) {
    try {
        return compute();
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace

std::vector<SweepRow> stability_sweep(SwitchPattern pattern, double q,
                                      std::span<const double> baseline_risks) {
    detail::check_probability(q, "q");
    if (baseline_risks.empty()) {
        throw std::invalid_argument("baseline risk list must be nonempty");
    }
    for (double r : baseline_risks) {
        if (!(r >= 0.0 && r < 1.0)) {
            throw std::invalid_argument("baseline risks must lie in [0,1)");
        }
    }
    const StableScale stable = stable_scale(pattern);
    std::vector<SweepRow> rows;
    rows.reserve(baseline_risks.size());
    for (double r : baseline_risks) {
        const RiskPair rp = exact_risks({pattern, q, r});
        SweepRow row;
        row.r = r;
        row.p0 = rp.p0;
        row.p1 = rp.p1;
        row.rr = cell([&] { return risk_ratio(rp).value; });
        row.sr = cell([&] { return survival_ratio(rp).value; });
        row.rd = cell([&] { return risk_difference(rp).value; });
        row.odds = cell([&] { return odds_ratio(rp).value; });
        row.grrr_value = cell([&] { return grrr(rp).value; });
        row.stable_value = cell([&] {
            const double v = (stable.scale == Scale::risk_ratio ? risk_ratio(rp)
                                                                : survival_ratio(rp))
                                 .value;
            return stable.reciprocal ? 1.0 / v : v;
        });
        rows.push_back(row);
    }
    return rows;
}

SimulatedCohort simulate_cohort(const SwitchModel& m, std::int64_t n, std::uint64_t seed) {
    detail::check_probability(m.q, "q");
    detail::check_probability(m.r, "r");
    if (n <= 0) {
        throw std::invalid_argument("cohort size must be positive");
    }
    PopulationCounts counts;
    for (std::int64_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::uint64_t>(i);
        const bool b = rng::bernoulli(m.r, seed, rng::Stream::background, idx);
        const bool s = rng::bernoulli(m.q, seed, rng::Stream::switch_indicator, idx);
        const PotentialOutcomePair po = potential_outcomes(m.pattern, b, s);
        switch (classify_response(po.y0, po.y1)) {
            case ResponseType::doomed: ++counts.n_doomed; break;
            case ResponseType::causal: ++counts.n_causal; break;
            case ResponseType::preventive: ++counts.n_preventive; break;
            case ResponseType::immune: ++counts.n_immune; break;
        }
    }
    return {counts, seed, n};
}

TwoByTwoTable observed_table(const SimulatedCohort& c, double treat_probability,
                             std::uint64_t seed) {
    if (!(treat_probability > 0.0 && treat_probability < 1.0)) {
        throw std::invalid_argument("treatment probability must lie strictly between 0 and 1");
    }
    if (c.counts.total() != c.n || c.n <= 0) {
        throw std::invalid_argument("cohort counts must total its size");
    }
    // Individuals are laid out sorted by response type; the index into that
    // layout drives the assignment draw, so the table is reproducible.
    const std::int64_t boundaries[4] = {
        c.counts.n_doomed,
        c.counts.n_doomed + c.counts.n_causal,
        c.counts.n_doomed + c.counts.n_causal + c.counts.n_preventive,
        c.n,
    };
    const bool y0_of[4] = {true, false, true, false};
    const bool y1_of[4] = {true, true, false, false};

    TwoByTwoTable t;
    std::int64_t type = 0;
    for (std::int64_t i = 0; i < c.n; ++i) {
        while (i >= boundaries[type]) ++type;
        const bool treated = rng::bernoulli(treat_probability, seed, rng::Stream::treatment,
                                            static_cast<std::uint64_t>(i));
        const bool y = treated ? y1_of[type] : y0_of[type];
        if (treated) {
            (y ? t.a1_y1 : t.a1_y0) += 1;
        } else {
            (y ? t.a0_y1 : t.a0_y0) += 1;
        }
    }
    return t;
}

}  // namespace relrisk

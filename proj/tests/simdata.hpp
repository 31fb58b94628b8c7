#pragma once

#include <array>
#include <cstdint>

#include "relrisk/glm.hpp"
#include "relrisk/rng.hpp"
#include "relrisk/switchmodel.hpp"

namespace relrisk::testdata {

// Randomized trial over two background strata sharing one switch prevalence.
// Rows are the eight stratum/arm/outcome cells weighted by their counts, so
// fits on this dataset are cheap regardless of n_per.
inline RegressionDataset two_stratum(SwitchPattern pattern, double q, std::array<double, 2> rs,
                                     std::int64_t n_per, std::uint64_t seed) {
    std::int64_t cells[2][2][2] = {};
    for (int st = 0; st < 2; ++st) {
        const std::uint64_t stratum_seed = seed + static_cast<std::uint64_t>(st);
        for (std::int64_t i = 0; i < n_per; ++i) {
            const auto idx = static_cast<std::uint64_t>(i);
            const bool b = rng::bernoulli(rs[st], stratum_seed, rng::Stream::background, idx);
            const bool s = rng::bernoulli(q, stratum_seed, rng::Stream::switch_indicator, idx);
            const PotentialOutcomePair po = potential_outcomes(pattern, b, s);
            const bool a = rng::bernoulli(0.5, stratum_seed, rng::Stream::treatment, idx);
            const bool y = a ? po.y1 : po.y0;
            ++cells[st][a][y];
        }
    }
    RegressionDataset d;
    d.covariate_names = {"stratum1"};
    for (int st = 0; st < 2; ++st) {
        for (int a = 0; a < 2; ++a) {
            for (int y = 0; y < 2; ++y) {
                if (cells[st][a][y] > 0) {
                    d.exposure.push_back(a);
                    d.outcome.push_back(y);
                    d.covariates.push_back({static_cast<double>(st)});
                    d.weights.push_back(static_cast<double>(cells[st][a][y]));
                }
            }
        }
    }
    return d;
}

// Exposed rows are all events: the exposed event probability has no maximum
// likelihood estimate below 1 under a log link.
inline RegressionDataset separated_dataset() {
    RegressionDataset d;
    for (int i = 0; i < 10; ++i) {
        d.exposure.push_back(1);
        d.outcome.push_back(1);
    }
    for (int i = 0; i < 10; ++i) {
        d.exposure.push_back(0);
        d.outcome.push_back(i < 5 ? 1 : 0);
    }
    return d;
}

// One weighted row per cell of a 2x2 table.
inline RegressionDataset table_dataset(std::int64_t a1_y1, std::int64_t a1_y0,
                                       std::int64_t a0_y1, std::int64_t a0_y0) {
    RegressionDataset d;
    const std::int64_t counts[4] = {a1_y1, a1_y0, a0_y1, a0_y0};
    const int a_of[4] = {1, 1, 0, 0};
    const int y_of[4] = {1, 0, 1, 0};
    for (int c = 0; c < 4; ++c) {
        if (counts[c] > 0) {
            d.exposure.push_back(a_of[c]);
            d.outcome.push_back(y_of[c]);
            d.weights.push_back(static_cast<double>(counts[c]));
        }
    }
    return d;
}

}  // namespace relrisk::testdata

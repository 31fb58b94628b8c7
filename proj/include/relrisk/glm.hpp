#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace relrisk {

// Individual-level data for binomial regression with a binary exposure and
// binary/categorical covariate indicators. Row weights act as frequency
// counts; an empty weight vector means unit weights.
struct RegressionDataset {
    std::vector<int> exposure;                    // 0/1 per row
    std::vector<int> outcome;                     // 0/1 per row
    std::vector<std::string> covariate_names;     // k names
    std::vector<std::vector<double>> covariates;  // per row, k indicator values
    std::vector<double> weights;                  // positive; empty = all 1

    std::size_t size() const noexcept { return outcome.size(); }
};

// Which probability the log link is placed on: the outcome itself (the
// exposure coefficient exponentiates to an adjusted risk ratio) or its
// complement (adjusted survival ratio).
enum class ReferenceLevel { outcome, complement };

struct FitOptions {
    int max_iterations = 200;
    double coef_tolerance = 1e-10;       // max-change convergence criterion
    double loglik_rel_tolerance = 1e-12; // relative loglik convergence criterion
    double mean_guard = 1e-10;           // fitted means kept <= 1 - mean_guard
};

struct FitResult {
    ReferenceLevel reference_level = ReferenceLevel::outcome;
    std::vector<std::string> coefficient_names;  // intercept, a, covariates...
    std::vector<double> coefficients;            // log scale
    std::vector<double> std_errors;              // from the inverse Fisher information
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
    double max_fitted_probability = 0.0;
    std::vector<double> loglik_trace;  // loglik after each accepted step
};

// Maximum-likelihood fit of a binomial model with mean exp(eta) by
// iteratively reweighted least squares with step-halving. The linear
// predictor is capped so fitted means stay below 1 during iteration; a mean
// pinned at the cap with a non-vanishing score throws
// Error{errc::separation_detected}, a rank-deficient design throws
// Error{errc::collinear_design}, and hitting the iteration cap returns with
// converged = false.
FitResult fit_log_binomial(const RegressionDataset& d, ReferenceLevel level,
                           const FitOptions& opts = {});

// Picks the reference level from the crude (marginal) direction of effect:
// outcome when the crude treated risk does not exceed the untreated risk,
// complement otherwise.
FitResult auto_link(const RegressionDataset& d, const FitOptions& opts = {});

// Main-effects fits on both reference levels; returns
// (loglik_outcome, loglik_complement). Throws Error{errc::not_converged}
// if either fit fails to converge.
std::pair<double, double> loglik_compare(const RegressionDataset& d,
                                         const FitOptions& opts = {});

// Likelihood diagnostics at arbitrary coefficients (intercept, exposure,
// covariates...), mainly for validating fits against finite differences.
double log_likelihood(const RegressionDataset& d, ReferenceLevel level,
                      const std::vector<double>& coefficients);
std::vector<double> score_vector(const RegressionDataset& d, ReferenceLevel level,
                                 const std::vector<double>& coefficients);

}  // namespace relrisk

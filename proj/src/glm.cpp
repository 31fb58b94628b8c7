#include "relrisk/glm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "relrisk/error.hpp"

namespace relrisk {

namespace {

struct Design {
    Eigen::MatrixXd X;  // intercept, exposure, covariate indicators
    Eigen::VectorXd y;  // modeled response (flipped for the complement level)
    Eigen::VectorXd w;
};

Design build_design(const RegressionDataset& d, ReferenceLevel level) {
    const std::size_t n = d.size();
    if (n == 0) throw std::invalid_argument("dataset is empty");
    if (d.exposure.size() != n) {
        throw std::invalid_argument("exposure and outcome columns differ in length");
    }
    const std::size_t k = d.covariate_names.size();
    if (!d.covariates.empty() && d.covariates.size() != n) {
        throw std::invalid_argument("covariate rows and outcome column differ in length");
    }
    if (k > 0 && d.covariates.empty()) {
        throw std::invalid_argument("covariate names given but no covariate rows");
    }
    if (!d.weights.empty() && d.weights.size() != n) {
        throw std::invalid_argument("weight column and outcome column differ in length");
    }

    Design ds;
    ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(2 + k));
    ds.y.resize(static_cast<Eigen::Index>(n));
    ds.w.resize(static_cast<Eigen::Index>(n));
    bool any_exposed = false;
    bool any_unexposed = false;
    for (std::size_t i = 0; i < n; ++i) {
        const int a = d.exposure[i];
        const int y = d.outcome[i];
        if (a != 0 && a != 1) throw std::invalid_argument("exposure values must be 0 or 1");
        if (y != 0 && y != 1) throw std::invalid_argument("outcome values must be 0 or 1");
        (a == 1 ? any_exposed : any_unexposed) = true;
        const double wi = d.weights.empty() ? 1.0 : d.weights[i];
        if (!(wi > 0.0) || !std::isfinite(wi)) {
            throw std::invalid_argument("row weights must be positive and finite");
        }
        if (k > 0 && d.covariates[i].size() != k) {
            throw std::invalid_argument("covariate row width does not match covariate names");
        }
        const auto row = static_cast<Eigen::Index>(i);
        ds.X(row, 0) = 1.0;
        ds.X(row, 1) = static_cast<double>(a);
        for (std::size_t j = 0; j < k; ++j) {
            const double x = d.covariates[i][j];
            if (x != 0.0 && x != 1.0) {
                throw std::invalid_argument("covariates must be 0/1 indicators");
            }
            ds.X(row, static_cast<Eigen::Index>(2 + j)) = x;
        }
        ds.y(row) = level == ReferenceLevel::outcome ? static_cast<double>(y)
                                                     : static_cast<double>(1 - y);
        ds.w(row) = wi;
    }
    if (!any_exposed || !any_unexposed) {
        throw std::invalid_argument("dataset needs at least one exposed and one unexposed row");
    }
    return ds;
}

double loglik_at(const Design& ds, const Eigen::VectorXd& eta) {
    // log(mu) is eta itself, so event rows contribute w*eta directly.
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        if (ds.y(i) > 0.5) {
            ll += ds.w(i) * eta(i);
        } else {
            const double mu = std::exp(eta(i));
            if (mu >= 1.0) return -std::numeric_limits<double>::infinity();
            ll += ds.w(i) * std::log1p(-mu);
        }
    }
    return ll;
}

Eigen::VectorXd score_at(const Design& ds, const Eigen::VectorXd& eta) {
    Eigen::VectorXd u(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double mu = std::exp(eta(i));
        u(i) = ds.w(i) * (ds.y(i) - mu) / (1.0 - mu);
    }
    return ds.X.transpose() * u;
}

std::vector<std::string> names_for(const RegressionDataset& d) {
    std::vector<std::string> names{"intercept", "a"};
    names.insert(names.end(), d.covariate_names.begin(), d.covariate_names.end());
    return names;
}

}  // namespace

FitResult fit_log_binomial(const RegressionDataset& d, ReferenceLevel level,
                           const FitOptions& opts) {
    if (opts.max_iterations <= 0) throw std::invalid_argument("iteration cap must be positive");
    const Design ds = build_design(d, level);
    const Eigen::Index n = ds.X.rows();
    const Eigen::Index p = ds.X.cols();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(ds.X);
    if (qr.rank() < p) {
        throw Error(errc::collinear_design, "design matrix columns are linearly dependent");
    }

    // Start at the overall event proportion of the modeled response with all
    // other coefficients zero; fitted means then begin strictly inside (0,1).
    const double total_w = ds.w.sum();
    const double event_rate = std::clamp(ds.w.dot(ds.y) / total_w, 1e-6, 1.0 - 1e-6);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    beta(0) = std::log(event_rate);

    const double eta_cap = std::log1p(-opts.mean_guard);
    Eigen::VectorXd eta = ds.X * beta;
    double ll = loglik_at(ds, eta);

    FitResult result;
    result.reference_level = level;
    result.coefficient_names = names_for(d);

    Eigen::VectorXd mu = eta.array().exp();
    for (int iter = 0; iter < opts.max_iterations && !result.converged; ++iter) {
        // Weighted least squares step on the working response.
        Eigen::VectorXd irls_w(n);
        Eigen::VectorXd z(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            irls_w(i) = ds.w(i) * mu(i) / (1.0 - mu(i));
            z(i) = eta(i) + (ds.y(i) - mu(i)) / mu(i);
        }
        const Eigen::MatrixXd xtwx =
            ds.X.transpose() * irls_w.asDiagonal() * ds.X;
        const Eigen::VectorXd xtwz = ds.X.transpose() * (irls_w.cwiseProduct(z));
        const Eigen::VectorXd target = xtwx.ldlt().solve(xtwz);
        const Eigen::VectorXd step = target - beta;

        // Halve until the trial respects the mean cap and does not lose
        // likelihood; the current point is always feasible, so this ends.
        double t = 1.0;
        bool accepted = false;
        for (int h = 0; h < 64; ++h, t *= 0.5) {
            const Eigen::VectorXd trial = beta + t * step;
            const Eigen::VectorXd trial_eta = ds.X * trial;
            if (trial_eta.maxCoeff() > eta_cap) continue;
            const double trial_ll = loglik_at(ds, trial_eta);
            if (trial_ll >= ll) {
                const double coef_change = (trial - beta).cwiseAbs().maxCoeff();
                const double ll_change = trial_ll - ll;
                beta = trial;
                eta = trial_eta;
                mu = eta.array().exp();
                result.converged =
                    coef_change < opts.coef_tolerance ||
                    ll_change <= opts.loglik_rel_tolerance * std::max(1.0, std::fabs(trial_ll));
                ll = trial_ll;
                accepted = true;
                break;
            }
        }
        result.iterations = iter + 1;
        if (!accepted) break;
        result.loglik_trace.push_back(ll);
    }

    const Eigen::VectorXd final_score = score_at(ds, eta);
    const double max_mu = mu.maxCoeff();
    if (max_mu >= 1.0 - 2.0 * opts.mean_guard &&
        final_score.cwiseAbs().maxCoeff() > 1e-3) {
        throw Error(errc::separation_detected,
                    "a fitted mean is pinned at 1 with a non-vanishing score; the event "
                    "probability of some covariate pattern is not identifiable below 1");
    }

    Eigen::VectorXd irls_w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        irls_w(i) = ds.w(i) * mu(i) / (1.0 - mu(i));
    }
    const Eigen::MatrixXd info = ds.X.transpose() * irls_w.asDiagonal() * ds.X;
    const Eigen::MatrixXd cov = info.ldlt().solve(Eigen::MatrixXd::Identity(p, p));

    result.coefficients.assign(beta.data(), beta.data() + p);
    result.std_errors.resize(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j) {
        result.std_errors[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, cov(j, j)));
    }
    result.loglik = ll;
    result.max_fitted_probability = max_mu;
    return result;
}

FitResult auto_link(const RegressionDataset& d, const FitOptions& opts) {
    const Design ds = build_design(d, ReferenceLevel::outcome);
    double w1 = 0.0, e1 = 0.0, w0 = 0.0, e0 = 0.0;
    for (Eigen::Index i = 0; i < ds.X.rows(); ++i) {
        if (ds.X(i, 1) == 1.0) {
            w1 += ds.w(i);
            e1 += ds.w(i) * ds.y(i);
        } else {
            w0 += ds.w(i);
            e0 += ds.w(i) * ds.y(i);
        }
    }
    if (w1 == 0.0 || w0 == 0.0) {
        throw Error(errc::empty_margin, "both exposure arms need positive weight");
    }
    const double p1 = e1 / w1;
    const double p0 = e0 / w0;
    // Crude direction decides the scale, mirroring the switch rule's
    // tie-break: a non-increased risk is modeled on the outcome level.
    const ReferenceLevel level =
        p1 <= p0 ? ReferenceLevel::outcome : ReferenceLevel::complement;
    return fit_log_binomial(d, level, opts);
}

std::pair<double, double> loglik_compare(const RegressionDataset& d, const FitOptions& opts) {
    const FitResult on_outcome = fit_log_binomial(d, ReferenceLevel::outcome, opts);
    const FitResult on_complement = fit_log_binomial(d, ReferenceLevel::complement, opts);
    if (!on_outcome.converged || !on_complement.converged) {
        throw Error(errc::not_converged, "both reference levels must converge to compare fits");
    }
    return {on_outcome.loglik, on_complement.loglik};
}

double log_likelihood(const RegressionDataset& d, ReferenceLevel level,
                      const std::vector<double>& coefficients) {
    const Design ds = build_design(d, level);
    if (static_cast<Eigen::Index>(coefficients.size()) != ds.X.cols()) {
        throw std::invalid_argument("coefficient count does not match the design");
    }
    const Eigen::VectorXd beta =
        Eigen::Map<const Eigen::VectorXd>(coefficients.data(), ds.X.cols());
    return loglik_at(ds, ds.X * beta);
}

std::vector<double> score_vector(const RegressionDataset& d, ReferenceLevel level,
                                 const std::vector<double>& coefficients) {
    const Design ds = build_design(d, level);
    if (static_cast<Eigen::Index>(coefficients.size()) != ds.X.cols()) {
        throw std::invalid_argument("coefficient count does not match the design");
    }
    const Eigen::VectorXd beta =
        Eigen::Map<const Eigen::VectorXd>(coefficients.data(), ds.X.cols());
    const Eigen::VectorXd eta = ds.X * beta;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        if (eta(i) >= 0.0) {
            throw std::invalid_argument("score is undefined where a fitted mean reaches 1");
        }
    }
    const Eigen::VectorXd s = score_at(ds, eta);
    return {s.data(), s.data() + s.size()};
}

}  // namespace relrisk

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kmpe/distance_curve.hpp"
#include "kmpe/kernel.hpp"
#include "kmpe/simplex_qp.hpp"

namespace kmpe {

enum class ThresholdKind { km1, km2, fixed };

/// How the gradient threshold nu is chosen.
struct ThresholdRule {
    ThresholdKind kind = ThresholdKind::km1;
    std::optional<double> fixed_value;  // required for kind == fixed
    double km2_init_weight = 0.8;       // weight of the initial slope in KM2

    void validate() const;
};

struct EstimatorOptions {
    double eps = 0.04;
    double lambda_ub = 10.0;
    QpOptions qp;
    bool warm_start = true;  // reuse QP solutions across nearby lambdas
};

struct SearchStep {
    double lambda_curr;
    double slope;  // for value thresholding: d_hat(lambda_curr)
    bool converged;
};

struct EstimateReport {
    std::string estimator;  // "km1", "km2", "fixed", "value"
    double lambda_hat = 1.0;
    double kappa_hat = 0.0;
    double nu_or_tau = 0.0;
    std::optional<KernelSpec> kernel;
    std::vector<SearchStep> search_trace;
    std::vector<DistanceEval> curve;
    EstimatorOptions options;
    std::size_t qp_solves = 0;
    std::size_t qp_iterations = 0;
    bool converged = true;               // every QP reached its tolerance
    bool threshold_unreachable = false;  // value estimator: d_hat(lambda_ub) < tau
    std::vector<std::string> warnings;
};

struct KappaEstimate {
    double kappa;
    bool clamped;  // lambda < 1 was raised to 1
};

/// kappa = 1 - 1/lambda; lambda < 1 is clamped to kappa = 0 with `clamped` set.
KappaEstimate kappa_from_lambda(double lambda);

/// nu = 1/sqrt(min(n, m)).
double km1_threshold(std::size_t n, std::size_t m);

struct Km2Threshold {
    double nu;
    double init_slope;   // measured at lambda = 1 + eps/4
    double final_slope;  // empirical MMD, the slope as lambda -> infinity
    bool converged;
};

/// nu = w * init_slope + (1 - w) * final_slope, w = init_weight (0.8 by default).
Km2Threshold km2_threshold(const GramMatrix& k, double eps = 0.04, double init_weight = 0.8,
                           const QpOptions& qp = {});

/// Resolves nu for the rule on this Gram matrix.
double resolve_threshold(const ThresholdRule& rule, const GramMatrix& k,
                         const EstimatorOptions& opts = {});

/// Binary search on [1, lambda_ub] for the point where the slope of d_hat first
/// exceeds nu. Returns the last midpoint evaluated.
EstimateReport gradient_threshold_estimate(const GramMatrix& k, double nu,
                                           const EstimatorOptions& opts = {});

/// Leftmost lambda in [1, lambda_ub] with d_hat(lambda) >= tau, resolved to grid_step.
/// When d_hat(lambda_ub) < tau the report is flagged and lambda_hat = lambda_ub.
EstimateReport value_threshold_estimate(const GramMatrix& k, double tau, double grid_step = 0.01,
                                        const EstimatorOptions& opts = {});

/// Number of halvings the gradient search performs for these options.
std::size_t gradient_search_iterations(const EstimatorOptions& opts);

}  // namespace kmpe

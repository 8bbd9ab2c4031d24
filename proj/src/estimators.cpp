#include "kmpe/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "kmpe/errors.hpp"

namespace kmpe {

namespace {

void check_options(const EstimatorOptions& opts) {
    if (!(opts.eps > 0.0) || !std::isfinite(opts.eps)) throw InputError("eps must be finite and positive");
    if (!std::isfinite(opts.lambda_ub) || !(opts.lambda_ub > 1.0 + opts.eps)) {
        throw InputError("lambda_ub must exceed 1 + eps");
    }
    if (!(opts.qp.tol > 0.0)) throw InputError("qp tolerance must be positive");
    if (opts.qp.max_iter == 0) throw InputError("qp max_iter must be positive");
}

void finish(EstimateReport& report, const CurveEvaluator& evaluator) {
    const KappaEstimate kappa = kappa_from_lambda(report.lambda_hat);
    report.kappa_hat = std::clamp(kappa.kappa, 0.0, 1.0 - 1.0 / report.options.lambda_ub);
    if (kappa.clamped) report.warnings.emplace_back("lambda_hat < 1 clamped to kappa_hat = 0");
    report.qp_solves = evaluator.solves();
    report.qp_iterations = evaluator.total_iterations();
    report.converged = evaluator.all_converged();
    if (!report.converged) {
        report.warnings.emplace_back("one or more QP solves hit max_iter before reaching qp_tol");
    }
}

}  // namespace

void ThresholdRule::validate() const {
    if (kind == ThresholdKind::fixed) {
        if (!fixed_value) throw InputError("fixed threshold rule needs a value");
        if (!std::isfinite(*fixed_value) || *fixed_value < 0.0) {
            throw InputError("fixed threshold must be finite and >= 0");
        }
    }
    if (!(km2_init_weight >= 0.0 && km2_init_weight <= 1.0)) {
        throw InputError("km2 initial-slope weight must lie in [0, 1]");
    }
}

KappaEstimate kappa_from_lambda(double lambda) {
    if (!(lambda >= 1.0)) return {0.0, true};
    return {1.0 - 1.0 / lambda, false};
}

double km1_threshold(std::size_t n, std::size_t m) {
    if (n == 0 || m == 0) throw InputError("km1_threshold: n and m must be positive");
    return 1.0 / std::sqrt(static_cast<double>(std::min(n, m)));
}

Km2Threshold km2_threshold(const GramMatrix& k, double eps, double init_weight, const QpOptions& qp) {
    if (!(eps > 0.0)) throw InputError("km2_threshold: eps must be positive");
    if (!(init_weight >= 0.0 && init_weight <= 1.0)) throw InputError("km2_threshold: weight must lie in [0, 1]");
    const SlopeEval init = slope(k, 1.0 + eps / 4.0, eps, qp);
    const double final_slope = empirical_mmd(k);
    return Km2Threshold{init_weight * init.value + (1.0 - init_weight) * final_slope, init.value,
                        final_slope, init.converged()};
}

double resolve_threshold(const ThresholdRule& rule, const GramMatrix& k, const EstimatorOptions& opts) {
    rule.validate();
    switch (rule.kind) {
        case ThresholdKind::km1: return km1_threshold(k.n(), k.m());
        case ThresholdKind::km2: return km2_threshold(k, opts.eps, rule.km2_init_weight, opts.qp).nu;
        case ThresholdKind::fixed: return *rule.fixed_value;
    }
    return 0.0;
}

std::size_t gradient_search_iterations(const EstimatorOptions& opts) {
    check_options(opts);
    std::size_t count = 0;
    double left = 1.0;
    double right = opts.lambda_ub;
    while (right - left >= opts.eps) {
        const double curr = 0.5 * (left + right);
        right = curr;  // width halves either way
        ++count;
    }
    return count;
}

EstimateReport gradient_threshold_estimate(const GramMatrix& k, double nu, const EstimatorOptions& opts) {
    check_options(opts);
    if (!std::isfinite(nu) || nu < 0.0) throw InputError("gradient threshold nu must be finite and >= 0");

    EstimateReport report;
    report.estimator = "gradient";
    report.nu_or_tau = nu;
    report.options = opts;

    CurveEvaluator evaluator(k, opts.qp, opts.warm_start);
    double left = 1.0;
    double right = opts.lambda_ub;
    double curr = left;
    while (right - left >= opts.eps) {
        curr = 0.5 * (right + left);
        const SlopeEval s = evaluator.slope(curr, opts.eps);
        report.search_trace.push_back({curr, s.value, s.converged()});
        if (s.value > nu) {
            right = curr;
        } else {
            left = curr;
        }
    }
    report.lambda_hat = curr;
    finish(report, evaluator);
    return report;
}

EstimateReport value_threshold_estimate(const GramMatrix& k, double tau, double grid_step,
                                        const EstimatorOptions& opts) {
    check_options(opts);
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InputError("value threshold tau must be finite and positive");
    if (!(grid_step > 0.0) || !std::isfinite(grid_step)) throw InputError("grid_step must be finite and positive");

    EstimateReport report;
    report.estimator = "value";
    report.nu_or_tau = tau;
    report.options = opts;

    CurveEvaluator evaluator(k, opts.qp, opts.warm_start);
    const DistanceEval top = evaluator.evaluate(opts.lambda_ub);
    report.search_trace.push_back({opts.lambda_ub, top.d_hat, top.qp.converged});
    if (top.d_hat < tau) {
        report.threshold_unreachable = true;
        report.lambda_hat = opts.lambda_ub;
        report.warnings.emplace_back("d_hat(lambda_ub) < tau; threshold unreachable");
        finish(report, evaluator);
        return report;
    }

    // d_hat is zero on [0, 1], so the crossing lies in (1, lambda_ub].
    double lo = 1.0;
    double hi = opts.lambda_ub;
    while (hi - lo > grid_step) {
        const double mid = 0.5 * (lo + hi);
        const DistanceEval e = evaluator.evaluate(mid);
        report.search_trace.push_back({mid, e.d_hat, e.qp.converged});
        if (e.d_hat >= tau) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    report.lambda_hat = hi;
    finish(report, evaluator);
    return report;
}

}  // namespace kmpe

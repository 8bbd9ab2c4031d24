#include "kmpe/distance_curve.hpp"

#include <algorithm>
#include <cmath>

#include "kmpe/errors.hpp"

namespace kmpe {

namespace {

void check_lambda(double lambda) {
    if (!std::isfinite(lambda) || lambda < 0.0) throw InputError("lambda must be finite and >= 0");
}

DistanceEval to_eval(double lambda, QpSolution qp) {
    const double d = std::sqrt(std::max(qp.objective, 0.0));
    return DistanceEval{lambda, d, std::move(qp)};
}

void check_slope_args(double lambda_curr, double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InputError("slope: eps must be finite and positive");
    if (lambda_curr - eps / 4.0 < 0.0) throw InputError("slope: lambda_curr - eps/4 must be >= 0");
}

}  // namespace

LambdaWeights make_u(double lambda, std::size_t n, std::size_t m) {
    if (n == 0 || m == 0) throw InputError("make_u: n and m must be positive");
    check_lambda(lambda);
    LambdaWeights w{lambda, Eigen::VectorXd(static_cast<Eigen::Index>(n + m))};
    w.u.head(static_cast<Eigen::Index>(n)).setConstant(lambda / static_cast<double>(n));
    w.u.tail(static_cast<Eigen::Index>(m)).setConstant((1.0 - lambda) / static_cast<double>(m));
    return w;
}

DistanceEval d_hat(const GramMatrix& k, double lambda, const QpOptions& opts) {
    const LambdaWeights w = make_u(lambda, k.n(), k.m());
    return to_eval(lambda, solve_qp(k, w.u, opts));
}

SlopeEval slope(const GramMatrix& k, double lambda_curr, double eps, const QpOptions& opts) {
    check_slope_args(lambda_curr, eps);
    const double lo = lambda_curr - eps / 4.0;
    const double hi = lambda_curr + eps / 4.0;
    DistanceEval left = d_hat(k, lo, opts);
    DistanceEval right = d_hat(k, hi, opts);
    const double value = (right.d_hat - left.d_hat) / (hi - lo);
    return SlopeEval{lambda_curr, value, std::move(left), std::move(right)};
}

std::vector<DistanceEval> curve(const GramMatrix& k, const std::vector<double>& lambdas,
                                const QpOptions& opts) {
    for (double l : lambdas) check_lambda(l);
    CurveEvaluator evaluator(k, opts);
    std::vector<DistanceEval> out;
    out.reserve(lambdas.size());
    for (double l : lambdas) out.push_back(evaluator.evaluate(l));
    return out;
}

DistanceEval CurveEvaluator::evaluate(double lambda) {
    const LambdaWeights w = make_u(lambda, k_.n(), k_.m());
    const SimplexVector* warm = nullptr;
    if (warm_start_ && !solved_.empty()) {
        const auto nearest = std::min_element(
            solved_.begin(), solved_.end(), [lambda](const auto& a, const auto& b) {
                return std::abs(a.first - lambda) < std::abs(b.first - lambda);
            });
        warm = &nearest->second;
    }
    QpSolution qp = detail::solve_qp_warm(k_, w.u, opts_, warm);
    ++solves_;
    iterations_ += qp.iterations;
    all_converged_ = all_converged_ && qp.converged;
    if (warm_start_) solved_.emplace_back(lambda, qp.v_star);
    return to_eval(lambda, std::move(qp));
}

SlopeEval CurveEvaluator::slope(double lambda_curr, double eps) {
    check_slope_args(lambda_curr, eps);
    const double lo = lambda_curr - eps / 4.0;
    const double hi = lambda_curr + eps / 4.0;
    DistanceEval left = evaluate(lo);
    DistanceEval right = evaluate(hi);
    const double value = (right.d_hat - left.d_hat) / (hi - lo);
    return SlopeEval{lambda_curr, value, std::move(left), std::move(right)};
}

}  // namespace kmpe

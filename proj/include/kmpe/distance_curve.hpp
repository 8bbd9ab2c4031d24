#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "kmpe/kernel.hpp"
#include "kmpe/simplex_qp.hpp"

namespace kmpe {

/// u_lambda = (lambda/n) [1_n; 0_m] + ((1 - lambda)/m) [0_n; 1_m].
/// Entries sum to 1; the component part is negative once lambda > 1.
struct LambdaWeights {
    double lambda;
    Eigen::VectorXd u;
};

LambdaWeights make_u(double lambda, std::size_t n, std::size_t m);

/// One point of the empirical distance curve. d_hat = sqrt(max(qp.objective, 0)).
struct DistanceEval {
    double lambda;
    double d_hat;
    QpSolution qp;
};

DistanceEval d_hat(const GramMatrix& k, double lambda, const QpOptions& opts = {});

/// Central difference (d(l + eps/4) - d(l - eps/4)) / (eps/2). Not clamped.
struct SlopeEval {
    double lambda;
    double value;
    DistanceEval left;
    DistanceEval right;

    bool converged() const noexcept { return left.qp.converged && right.qp.converged; }
};

SlopeEval slope(const GramMatrix& k, double lambda_curr, double eps, const QpOptions& opts = {});

/// d_hat at each lambda, input order preserved.
std::vector<DistanceEval> curve(const GramMatrix& k, const std::vector<double>& lambdas,
                                const QpOptions& opts = {});

/// Evaluates d_hat at a sequence of nearby lambdas, warm-starting each QP from the
/// solution of the closest lambda solved so far.
class CurveEvaluator {
public:
    CurveEvaluator(const GramMatrix& k, QpOptions opts, bool warm_start = true)
        : k_(k), opts_(opts), warm_start_(warm_start) {}

    DistanceEval evaluate(double lambda);
    SlopeEval slope(double lambda_curr, double eps);

    std::size_t solves() const noexcept { return solves_; }
    std::size_t total_iterations() const noexcept { return iterations_; }
    bool all_converged() const noexcept { return all_converged_; }

private:
    const GramMatrix& k_;
    QpOptions opts_;
    bool warm_start_;
    std::vector<std::pair<double, SimplexVector>> solved_;
    std::size_t solves_ = 0;
    std::size_t iterations_ = 0;
    bool all_converged_ = true;
};

}  // namespace kmpe

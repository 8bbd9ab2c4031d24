#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "kmpe/kernel.hpp"

namespace kmpe {

/// Point of the probability simplex: weights >= 0 summing to 1 (both within 1e-12).
/// Only produced by `project_simplex` or the solvers.
class SimplexVector {
public:
    const Eigen::VectorXd& weights() const noexcept { return w_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(w_.size()); }
    double operator[](std::size_t i) const { return w_[static_cast<Eigen::Index>(i)]; }

private:
    friend SimplexVector project_simplex(const Eigen::VectorXd& y);
    explicit SimplexVector(Eigen::VectorXd w) : w_(std::move(w)) {}
    Eigen::VectorXd w_;
};

enum class QpAlgorithm {
    /// Two-coordinate exact line search (mass moves from one support point to the
    /// steepest-descent vertex), second-order pair selection. O(N) per step.
    pairwise,
    /// Projected gradient with Nesterov momentum and function-value restart,
    /// fixed step 1/(2L). O(N^2) per step.
    accelerated_gradient,
};

std::string_view to_string(QpAlgorithm algorithm);

struct QpOptions {
    /// Target for the certified suboptimality bound min(FW gap, objective).
    double tol = 1e-8;
    /// Budget in units of one full gradient evaluation; the pairwise solver
    /// gets max_iter * N coordinate-pair steps.
    std::size_t max_iter = 20000;
    QpAlgorithm algorithm = QpAlgorithm::pairwise;
};

struct QpSolution {
    SimplexVector v_star;
    double objective = 0.0;      // (u - v*)^T K (u - v*), clamped at 0
    double gap = 0.0;            // Frank-Wolfe gap g^T v* - min_j g_j, g = 2 K (v* - u)
    std::size_t iterations = 0;  // solver steps (pair steps or gradient steps)
    std::size_t restarts = 0;    // momentum resets (accelerated_gradient only)
    bool converged = false;      // min(gap, objective) <= tol

    /// Upper bound on objective - optimum: both the FW gap and, since K is PSD
    /// and the optimum is >= 0, the objective itself.
    double suboptimality_bound() const noexcept { return gap < objective ? gap : objective; }
};

/// Euclidean projection onto the simplex (sort-and-threshold). Throws InputError
/// for empty or non-finite input.
SimplexVector project_simplex(const Eigen::VectorXd& y);

/// min over v in the simplex of (u - v)^T K (u - v), started from project_simplex(u).
/// Returns the best iterate with converged = false if the budget runs out.
QpSolution solve_qp(const GramMatrix& k, const Eigen::VectorXd& u, const QpOptions& opts = {});

namespace detail {

/// As solve_qp, but starts from whichever of {warm, project_simplex(u)} has the
/// lower objective.
QpSolution solve_qp_warm(const GramMatrix& k, const Eigen::VectorXd& u, const QpOptions& opts,
                         const SimplexVector* warm);

}  // namespace detail

}  // namespace kmpe

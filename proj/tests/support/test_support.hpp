#pragma once

// Test-only helpers: random instances and an exact grid-search oracle for the
// simplex QP. Nothing here calls into the solver it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "kmpe/data_io.hpp"
#include "kmpe/kernel.hpp"

namespace kmpe::testing {

/// Random PSD matrix A A^T / rank, made exactly symmetric.
inline Eigen::MatrixXd random_psd(std::size_t dim, std::mt19937_64& gen) {
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<std::size_t> rank_dist(1, dim);
    const auto rank = static_cast<Eigen::Index>(rank_dist(gen));
    Eigen::MatrixXd a(static_cast<Eigen::Index>(dim), rank);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = normal(gen);
    Eigen::MatrixXd k = a * a.transpose() / static_cast<double>(rank);
    return 0.5 * (k + k.transpose());
}

inline double quad_form(const Eigen::MatrixXd& k, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    const Eigen::VectorXd r = u - v;
    return r.dot(k * r);
}

/// Minimum of (u - v)^T K (u - v) over simplex grid points with spacing 1/steps.
///
/// The outer coordinates are enumerated; along the last coordinate pair the
/// objective is a convex quadratic in the shared mass split, so its grid minimum
/// is at one of the grid neighbours of the (clamped) continuous minimizer. That is
/// exactly the exhaustive grid minimum at O(steps^(d-2)) cost.
inline double simplex_grid_min(const Eigen::MatrixXd& k, const Eigen::VectorXd& u, int steps) {
    const auto d = static_cast<int>(u.size());
    const double h = 1.0 / steps;
    if (d == 1) return quad_form(k, u, Eigen::VectorXd::Ones(1));
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> counts(static_cast<std::size_t>(d), 0);

    // Evaluate with counts[0..d-3] fixed and `remaining` units split over the last two.
    auto line_min = [&](int remaining) {
        Eigen::VectorXd base = Eigen::VectorXd::Zero(d);
        for (int i = 0; i < d - 2; ++i) base[i] = counts[static_cast<std::size_t>(i)] * h;
        base[d - 1] = remaining * h;
        Eigen::VectorXd dir = Eigen::VectorXd::Zero(d);
        dir[d - 2] = h;
        dir[d - 1] = -h;
        // f(t) = f(base) + t * (-2 dir^T K (u - base)) + t^2 dir^T K dir, t = grid units moved.
        const Eigen::VectorXd r = u - base;
        const double lin = -2.0 * dir.dot(k * r);
        const double quad = dir.dot(k * dir);
        std::vector<int> candidates{0, remaining};
        if (quad > 0.0) {
            const double t_star = std::clamp(-lin / (2.0 * quad), 0.0, static_cast<double>(remaining));
            candidates.push_back(static_cast<int>(std::floor(t_star)));
            candidates.push_back(static_cast<int>(std::ceil(t_star)));
        }
        for (int t : candidates) {
            Eigen::VectorXd v = base + t * dir;
            best = std::min(best, quad_form(k, u, v));
        }
    };

    auto recurse = [&](auto&& self, int index, int remaining) -> void {
        if (index == d - 2) {
            line_min(remaining);
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            counts[static_cast<std::size_t>(index)] = c;
            self(self, index + 1, remaining - c);
        }
    };
    recurse(recurse, 0, steps);
    return best;
}

/// Plain enumeration of every grid point; only for small `steps`.
inline double simplex_grid_min_naive(const Eigen::MatrixXd& k, const Eigen::VectorXd& u, int steps) {
    const auto d = static_cast<int>(u.size());
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> counts(static_cast<std::size_t>(d), 0);
    auto recurse = [&](auto&& self, int index, int remaining) -> void {
        if (index == d - 1) {
            counts[static_cast<std::size_t>(index)] = remaining;
            Eigen::VectorXd v(d);
            for (int i = 0; i < d; ++i) v[i] = counts[static_cast<std::size_t>(i)] / static_cast<double>(steps);
            best = std::min(best, quad_form(k, u, v));
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            counts[static_cast<std::size_t>(index)] = c;
            self(self, index + 1, remaining - c);
        }
    };
    recurse(recurse, 0, steps);
    return best;
}

/// d_hat on the two-point instance K = [[1, k], [k, 1]]: (lambda - 1) sqrt(2 - 2k) for lambda >= 1.
inline double two_point_distance(double lambda, double k) {
    return lambda <= 1.0 ? 0.0 : (lambda - 1.0) * std::sqrt(2.0 - 2.0 * k);
}

inline GramMatrix two_point_gram(double k) {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, k, k, 1.0;
    return GramMatrix::from_matrix(m, 1, 1);
}

struct RandomCurveInstance {
    MpeInstance data;
    double sigma;
};

/// Gaussian pair with random size, dimension, separation, kappa and a random
/// sigma drawn log-uniformly around the median pairwise distance.
inline RandomCurveInstance random_curve_instance(std::mt19937_64& gen, std::size_t max_total = 200) {
    std::uniform_int_distribution<std::size_t> size_dist(5, max_total / 2);
    std::uniform_int_distribution<std::size_t> dim_dist(1, 3);
    std::uniform_real_distribution<double> sep_dist(0.5, 6.0);
    std::uniform_real_distribution<double> kappa_dist(0.0, 0.8);
    std::uniform_real_distribution<double> log_scale(std::log(0.1), std::log(10.0));
    SynthSpec spec{kappa_dist(gen), dim_dist(gen), sep_dist(gen), size_dist(gen), size_dist(gen), gen()};
    MpeInstance inst = synth_gaussian_pair(spec);
    const double median = median_pairwise_distance(SampleSet::concat(inst.mixture, inst.component));
    return {std::move(inst), median * std::exp(log_scale(gen))};
}

}  // namespace kmpe::testing

#include "kmpe/simplex_qp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "kmpe/errors.hpp"

namespace kmpe {

std::string_view to_string(QpAlgorithm algorithm) {
    switch (algorithm) {
        case QpAlgorithm::pairwise: return "pairwise";
        case QpAlgorithm::accelerated_gradient: return "accelerated_gradient";
    }
    return "?";
}

SimplexVector project_simplex(const Eigen::VectorXd& y) {
    if (y.size() == 0) throw InputError("project_simplex: empty vector");
    if (!y.allFinite()) throw InputError("project_simplex: non-finite entry");

    std::vector<double> sorted(y.data(), y.data() + y.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    // theta solves sum_i max(y_i - theta, 0) = 1.
    double cumulative = 0.0;
    double theta = sorted.front() - 1.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        cumulative += sorted[k];
        const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
        if (sorted[k] - candidate > 0.0) theta = candidate;
    }
    return SimplexVector((y.array() - theta).cwiseMax(0.0).matrix());
}

namespace {

// Feasible point with its image under K.
struct Iterate {
    Eigen::VectorXd x;
    Eigen::VectorXd kx;
    double objective = 0.0;
};

struct Problem {
    const GramMatrix& k;
    const Eigen::VectorXd& u;
    Eigen::VectorXd ku;
    const QpOptions& opts;
};

Iterate make_iterate(const Problem& p, Eigen::VectorXd x) {
    Iterate it;
    it.x = std::move(x);
    p.k.multiply(it.x, it.kx);
    it.objective = (it.x - p.u).dot(it.kx - p.ku);
    return it;
}

double fw_gap(const Iterate& it, const Problem& p) {
    const Eigen::VectorXd g = 2.0 * (it.kx - p.ku);
    return g.dot(it.x) - g.minCoeff();
}

bool certified(double gap, double objective, double tol) { return std::min(gap, objective) <= tol; }

std::size_t run_accelerated(const Problem& p, Iterate& x, std::size_t& restarts) {
    const double curvature = p.k.curvature_bound();
    if (!(curvature > 0.0)) return 0;  // K == 0 on the feasible directions: any point is optimal
    const double step = 1.0 / (2.0 * curvature);

    Eigen::VectorXd y = x.x;
    Eigen::VectorXd ky = x.kx;
    double t = 1.0;
    bool momentum = false;
    std::size_t iterations = 0;
    while (iterations < p.opts.max_iter) {
        ++iterations;
        const Eigen::VectorXd trial = y - step * (2.0 * (ky - p.ku));
        Iterate next = make_iterate(p, project_simplex(trial).weights());

        if (next.objective > x.objective) {
            if (!momentum) break;  // a plain step no longer descends: rounding floor
            ++restarts;
            momentum = false;
            t = 1.0;
            y = x.x;
            ky = x.kx;
            continue;
        }

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = (t - 1.0) / t_next;
        y = next.x + beta * (next.x - x.x);
        ky = next.kx + beta * (next.kx - x.kx);
        t = t_next;
        momentum = beta > 0.0;
        x = std::move(next);
        if (certified(fw_gap(x, p), x.objective, p.opts.tol)) break;
    }
    return iterations;
}

// Gradient statistics the pairwise solver needs every step.
struct GradientStats {
    Eigen::Index lo = 0;        // argmin_j g_j
    double g_lo = 0.0;
    double g_dot_v = 0.0;       // g^T v
    double g_dot_r = 0.0;       // g^T (v - u) = 2 * objective
};

GradientStats scan_gradient(const Eigen::VectorXd& g, const Eigen::VectorXd& v, const Eigen::VectorXd& u) {
    GradientStats s;
    s.g_lo = g.minCoeff(&s.lo);
    s.g_dot_v = g.dot(v);
    s.g_dot_r = s.g_dot_v - g.dot(u);
    return s;
}

// Indices with positive weight, O(1) insert/erase.
class SupportSet {
public:
    explicit SupportSet(const Eigen::VectorXd& v) : position_(static_cast<std::size_t>(v.size()), kAbsent) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (v[i] > 0.0) insert(i);
        }
    }
    void insert(Eigen::Index i) {
        auto& pos = position_[static_cast<std::size_t>(i)];
        if (pos != kAbsent) return;
        pos = members_.size();
        members_.push_back(i);
    }
    void erase(Eigen::Index i) {
        auto& pos = position_[static_cast<std::size_t>(i)];
        if (pos == kAbsent) return;
        const Eigen::Index last = members_.back();
        members_[pos] = last;
        position_[static_cast<std::size_t>(last)] = pos;
        members_.pop_back();
        pos = kAbsent;
    }
    const std::vector<Eigen::Index>& members() const noexcept { return members_; }

private:
    static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
    std::vector<Eigen::Index> members_;
    std::vector<std::size_t> position_;
};

std::size_t run_pairwise(const Problem& p, Iterate& x) {
    const Eigen::MatrixXd& k = p.k.matrix();
    const Eigen::Index dim = k.cols();
    const std::size_t budget = p.opts.max_iter * static_cast<std::size_t>(dim);
    // Incremental gradient updates drift; rebuild from a fresh product this often.
    const std::size_t refresh_every = 8 * static_cast<std::size_t>(dim);
    constexpr double kMinCurvature = 1e-12;

    const Eigen::VectorXd diag = k.diagonal();
    Eigen::VectorXd& v = x.x;
    Eigen::VectorXd g = 2.0 * (x.kx - p.ku);
    GradientStats stats = scan_gradient(g, v, p.u);
    SupportSet support(v);
    std::size_t steps = 0;
    std::size_t since_refresh = 0;
    const auto refresh = [&] {
        p.k.multiply(v, x.kx);
        g = 2.0 * (x.kx - p.ku);
        stats = scan_gradient(g, v, p.u);
        since_refresh = 0;
    };

    while (true) {
        const Eigen::Index lo = stats.lo;
        const double g_lo = stats.g_lo;
        if (certified(stats.g_dot_v - g_lo, 0.5 * stats.g_dot_r, p.opts.tol)) {
            if (since_refresh == 0) break;
            refresh();
            continue;
        }
        if (steps >= budget) break;

        // Donor: support point maximizing the exact decrease b^2 / a of moving mass to `lo`.
        const double k_lo = diag[lo];
        const double* col_lo = k.col(lo).data();
        Eigen::Index donor = -1;
        double best_score = 0.0;
        double best_a = 0.0;
        for (const Eigen::Index j : support.members()) {
            const double b = g[j] - g_lo;
            if (b <= 0.0) continue;
            const double a = std::max(k_lo + diag[j] - 2.0 * col_lo[j], kMinCurvature);
            const double score = b * b / a;
            if (score > best_score) {
                best_score = score;
                donor = j;
                best_a = a;
            }
        }
        if (donor < 0) {
            if (since_refresh == 0) break;
            refresh();
            continue;
        }

        ++steps;
        const double delta = std::min((g[donor] - g_lo) / (2.0 * best_a), v[donor]);
        v[lo] += delta;
        support.insert(lo);
        if (delta == v[donor]) {
            v[donor] = 0.0;
            support.erase(donor);
        } else {
            v[donor] -= delta;
        }

        if (++since_refresh >= refresh_every) {
            refresh();
            continue;
        }
        g += (2.0 * delta) * (k.col(lo) - k.col(donor));
        stats = scan_gradient(g, v, p.u);
    }
    if (since_refresh != 0) p.k.multiply(v, x.kx);
    x.objective = (v - p.u).dot(x.kx - p.ku);
    return steps;
}

}  // namespace

namespace detail {

QpSolution solve_qp_warm(const GramMatrix& k, const Eigen::VectorXd& u, const QpOptions& opts,
                         const SimplexVector* warm) {
    if (u.size() != static_cast<Eigen::Index>(k.size())) throw InputError("solve_qp: u has the wrong length");
    if (!u.allFinite()) throw InputError("solve_qp: u has non-finite entries");
    if (!(opts.tol > 0.0)) throw InputError("solve_qp: tolerance must be positive");
    if (opts.max_iter == 0) throw InputError("solve_qp: max_iter must be positive");
    if (warm && warm->size() != k.size()) throw InputError("solve_qp: warm start has the wrong length");

    Problem p{k, u, Eigen::VectorXd{}, opts};
    k.multiply(u, p.ku);

    Iterate x = make_iterate(p, project_simplex(u).weights());
    if (warm) {
        Iterate w = make_iterate(p, warm->weights());
        if (w.objective < x.objective) x = std::move(w);
    }

    std::size_t iterations = 0;
    std::size_t restarts = 0;
    if (!certified(fw_gap(x, p), x.objective, opts.tol)) {
        iterations = opts.algorithm == QpAlgorithm::pairwise ? run_pairwise(p, x)
                                                             : run_accelerated(p, x, restarts);
    }
    const double gap = fw_gap(x, p);
    const double objective = std::max(0.0, x.objective);
    const bool zero_curvature = !(k.curvature_bound() > 0.0);
    return QpSolution{project_simplex(x.x), objective, gap, iterations, restarts,
                      zero_curvature || certified(gap, objective, opts.tol)};
}

}  // namespace detail

QpSolution solve_qp(const GramMatrix& k, const Eigen::VectorXd& u, const QpOptions& opts) {
    return detail::solve_qp_warm(k, u, opts, nullptr);
}

}  // namespace kmpe

#include "kmpe/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "kmpe/errors.hpp"
#include "kmpe/parallel_kernels.hpp"
#include "kmpe/rng.hpp"

namespace kmpe {

namespace {

// Seed for the subsample taken when a median is requested over too many points.
constexpr std::uint64_t kMedianSubsampleSeed = 0x6b6d7065;

// Gershgorin bound of P K P with P = I - 11^T/N: exactly the curvature K shows
// along directions whose entries sum to zero.
double centered_gershgorin(const Eigen::MatrixXd& k, const Eigen::VectorXd& row_sums) {
    const Eigen::Index n = k.cols();
    const double inv_n = 1.0 / static_cast<double>(n);
    const double total = row_sums.sum();
    const double offset = total * inv_n * inv_n;
    double best = 0.0;
#pragma omp parallel for schedule(static) reduction(max : best)
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ri = row_sums[i] * inv_n;
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            acc += std::abs(k(j, i) - ri - row_sums[j] * inv_n + offset);
        }
        best = std::max(best, acc);
    }
    return best;
}

double median_of(std::vector<double>& values) {
    const std::size_t count = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(count / 2);
    std::nth_element(values.begin(), mid, values.end());
    const double upper = *mid;
    if (count % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

}  // namespace

KernelSpec::KernelSpec(double sigma) : sigma_(sigma) {
    if (!std::isfinite(sigma) || sigma <= 0.0) {
        std::ostringstream msg;
        msg << "kernel bandwidth must be finite and positive, got " << sigma;
        throw InputError(msg.str());
    }
}

GramMatrix GramMatrix::from_matrix(Eigen::MatrixXd k, std::size_t n, std::size_t m, Exec exec) {
    if (n == 0 || m == 0) throw InputError("Gram matrix needs at least one mixture and one component sample");
    const auto total = static_cast<Eigen::Index>(n + m);
    if (k.rows() != total || k.cols() != total) throw InputError("Gram matrix shape does not match n + m");
    if (!k.allFinite()) throw InputError("Gram matrix has non-finite entries");
    if (k != k.transpose()) throw InputError("Gram matrix is not exactly symmetric");

    GramMatrix g;
    g.k_ = std::move(k);
    g.n_ = n;
    g.m_ = m;
    g.exec_ = exec;
    const auto nn = static_cast<Eigen::Index>(n);
    if (exec == Exec::parallel) {
        kernels::block_row_sums_omp(g.k_, 0, nn, g.mixture_sums_);
        kernels::block_row_sums_omp(g.k_, nn, total, g.component_sums_);
    } else {
        kernels::block_row_sums_serial(g.k_, 0, nn, g.mixture_sums_);
        kernels::block_row_sums_serial(g.k_, nn, total, g.component_sums_);
    }
    g.gershgorin_ = g.k_.cwiseAbs().colwise().sum().maxCoeff();
    const Eigen::VectorXd row_sums = g.mixture_sums_ + g.component_sums_;
    g.curvature_bound_ = std::min(g.gershgorin_, centered_gershgorin(g.k_, row_sums));
    return g;
}

void GramMatrix::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    if (exec_ == Exec::parallel) {
        kernels::symv_omp(k_, x, y);
    } else {
        kernels::symv_serial(k_, x, y);
    }
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, const KernelSpec& spec) {
    if (a.size() != b.size()) throw InputError("rbf_kernel: points have different dimensions");
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sq += diff * diff;
    }
    return std::exp(-sq * spec.inv_two_sigma_sq());
}

GramMatrix gram(const SampleSet& mixture, const SampleSet& component, const KernelSpec& spec,
                Exec exec) {
    if (mixture.empty() || component.empty()) throw InputError("gram: mixture and component must be non-empty");
    if (mixture.dim() != component.dim()) throw InputError("gram: mixture and component dimensions differ");
    const SampleSet all = SampleSet::concat(mixture, component);
    Eigen::MatrixXd k;
    if (exec == Exec::parallel) {
        kernels::gram_fill_omp(all.matrix(), spec.inv_two_sigma_sq(), k);
    } else {
        kernels::gram_fill_serial(all.matrix(), spec.inv_two_sigma_sq(), k);
    }
    return GramMatrix::from_matrix(std::move(k), mixture.size(), component.size(), exec);
}

double median_pairwise_distance(const SampleSet& points, Exec exec) {
    if (points.size() < 2) throw DegenerateDataError("median pairwise distance needs at least two points");
    const RowMatrix* source = &points.matrix();
    RowMatrix subset;
    if (points.size() > kMedianSubsampleLimit) {
        Rng rng(kMedianSubsampleSeed);
        auto picked = rng.sample_without_replacement(kMedianSubsampleLimit, points.size());
        std::sort(picked.begin(), picked.end());
        subset.resize(static_cast<Eigen::Index>(picked.size()), points.matrix().cols());
        for (std::size_t i = 0; i < picked.size(); ++i) {
            subset.row(static_cast<Eigen::Index>(i)) = points.point(picked[i]);
        }
        source = &subset;
    }
    std::vector<double> distances = exec == Exec::parallel
                                        ? kernels::pairwise_distances_omp(*source)
                                        : kernels::pairwise_distances_serial(*source);
    return median_of(distances);
}

std::vector<KernelSpec> bandwidth_grid(const SampleSet& all_points, std::size_t count) {
    if (count == 0) throw InputError("bandwidth_grid: count must be positive");
    const double median = median_pairwise_distance(all_points);
    if (!(median > 0.0)) {
        throw DegenerateDataError("median pairwise distance is zero; points are (mostly) identical");
    }
    if (count == 1) return {KernelSpec(median)};

    const double lo = 0.1 * median;
    const double hi = 10.0 * median;
    const double log_lo = std::log(lo);
    const double step = (std::log(hi) - log_lo) / static_cast<double>(count - 1);
    std::vector<KernelSpec> grid;
    grid.reserve(count);
    grid.emplace_back(lo);
    for (std::size_t i = 1; i + 1 < count; ++i) {
        grid.emplace_back(std::exp(log_lo + step * static_cast<double>(i)));
    }
    grid.emplace_back(hi);
    return grid;
}

double empirical_mmd(const GramMatrix& k) {
    const auto n = static_cast<Eigen::Index>(k.n());
    const auto m = static_cast<Eigen::Index>(k.m());
    const double dn = static_cast<double>(n);
    const double dm = static_cast<double>(m);
    const double mean_ff = k.mixture_row_sums().head(n).sum() / (dn * dn);
    const double mean_fh = k.component_row_sums().head(n).sum() / (dn * dm);
    const double mean_hh = k.component_row_sums().tail(m).sum() / (dm * dm);
    return std::sqrt(std::max(0.0, mean_ff - 2.0 * mean_fh + mean_hh));
}

KernelSelection select_kernel(const SampleSet& mixture, const SampleSet& component,
                              const std::vector<KernelSpec>& grid, Exec exec) {
    if (grid.empty()) throw InputError("select_kernel: empty bandwidth grid");
    std::vector<double> scores;
    scores.reserve(grid.size());
    std::optional<KernelSelection> best;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        GramMatrix g = gram(mixture, component, grid[i], exec);
        const double score = empirical_mmd(g);
        scores.push_back(score);
        const bool better = !best || score > best->mmd ||
                            (score == best->mmd && grid[i].sigma() < best->spec.sigma());
        if (better) best.emplace(KernelSelection{grid[i], std::move(g), score, i, {}});
    }
    best->scores = std::move(scores);
    return std::move(*best);
}

}  // namespace kmpe

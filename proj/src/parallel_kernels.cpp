#include "kmpe/parallel_kernels.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

#include <omp.h>

namespace kmpe::kernels {

namespace {

inline double squared_distance(const RowMatrix& points, Eigen::Index i, Eigen::Index j) {
    double acc = 0.0;
    const Eigen::Index dim = points.cols();
    const double* a = points.data() + i * dim;
    const double* b = points.data() + j * dim;
    for (Eigen::Index d = 0; d < dim; ++d) {
        const double diff = a[d] - b[d];
        acc += diff * diff;
    }
    return acc;
}

// Entries stay strictly positive: exp underflow is lifted to the smallest normal double.
inline double rbf_entry(const RowMatrix& points, Eigen::Index i, Eigen::Index j, double inv) {
    const double value = std::exp(-squared_distance(points, i, j) * inv);
    return value < std::numeric_limits<double>::min() ? std::numeric_limits<double>::min()
                                                      : value;
}

inline void gram_row(const RowMatrix& points, double inv, Eigen::MatrixXd& out, Eigen::Index i) {
    const Eigen::Index n = points.rows();
    out(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
        out(j, i) = rbf_entry(points, i, j, inv);
    }
}

inline std::size_t pair_offset(std::size_t i, std::size_t n) { return i * n - i * (i + 1) / 2; }

}  // namespace

void gram_fill_serial(const RowMatrix& points, double inv_two_sigma_sq, Eigen::MatrixXd& out) {
    const Eigen::Index n = points.rows();
    out.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) gram_row(points, inv_two_sigma_sq, out, i);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) out(j, i) = out(i, j);
    }
}

void gram_fill_omp(const RowMatrix& points, double inv_two_sigma_sq, Eigen::MatrixXd& out) {
    const Eigen::Index n = points.rows();
    out.resize(n, n);
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < n; ++i) gram_row(points, inv_two_sigma_sq, out, i);
    // Mirror column i (lower part, contiguous) into row i.
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) out(j, i) = out(i, j);
    }
}

void symv_serial(const Eigen::MatrixXd& k, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    const Eigen::Index n = k.cols();
    y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = k.col(i).dot(x);
}

void symv_omp(const Eigen::MatrixXd& k, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    const Eigen::Index n = k.cols();
    y.resize(n);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) y[i] = k.col(i).dot(x);
}

std::vector<double> pairwise_distances_serial(const RowMatrix& points) {
    const auto n = static_cast<std::size_t>(points.rows());
    std::vector<double> out;
    out.reserve(n < 2 ? 0 : n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            out.push_back(std::sqrt(squared_distance(points, static_cast<Eigen::Index>(i),
                                                     static_cast<Eigen::Index>(j))));
        }
    }
    return out;
}

std::vector<double> pairwise_distances_omp(const RowMatrix& points) {
    const auto n = static_cast<std::size_t>(points.rows());
    std::vector<double> out(n < 2 ? 0 : n * (n - 1) / 2);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(n); ++si) {
        const auto i = static_cast<std::size_t>(si);
        const std::size_t base = pair_offset(i, n);
        for (std::size_t j = i + 1; j < n; ++j) {
            out[base + (j - i - 1)] = std::sqrt(squared_distance(
                points, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
    }
    return out;
}

void block_row_sums_serial(const Eigen::MatrixXd& k, Eigen::Index begin, Eigen::Index end,
                           Eigen::VectorXd& out) {
    const Eigen::Index n = k.cols();
    out.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = k.col(i).segment(begin, end - begin).sum();
}

void block_row_sums_omp(const Eigen::MatrixXd& k, Eigen::Index begin, Eigen::Index end,
                        Eigen::VectorXd& out) {
    const Eigen::Index n = k.cols();
    out.resize(n);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) out[i] = k.col(i).segment(begin, end - begin).sum();
}

int available_threads() { return omp_in_parallel() ? 1 : omp_get_max_threads(); }

}  // namespace kmpe::kernels

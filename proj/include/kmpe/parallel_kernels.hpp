#pragma once

// Data-parallel inner loops. Every OpenMP kernel has a serial twin with the
// same per-element arithmetic so tests can demand bitwise agreement and the
// benchmark can compare the two.

#include <vector>

#include <Eigen/Dense>

#include "kmpe/sample_set.hpp"

namespace kmpe::kernels {

/// Fills the symmetric Gaussian Gram matrix over `points` (upper triangle computed,
/// lower mirrored, unit diagonal). `inv_two_sigma_sq` is 1/(2σ²).
void gram_fill_serial(const RowMatrix& points, double inv_two_sigma_sq, Eigen::MatrixXd& out);
void gram_fill_omp(const RowMatrix& points, double inv_two_sigma_sq, Eigen::MatrixXd& out);

/// y = K x for symmetric K. Row i is read as column i (contiguous in column-major
/// storage), so every output element is one dot product with a fixed summation order.
void symv_serial(const Eigen::MatrixXd& k, const Eigen::VectorXd& x, Eigen::VectorXd& y);
void symv_omp(const Eigen::MatrixXd& k, const Eigen::VectorXd& x, Eigen::VectorXd& y);

/// All Euclidean distances over index pairs i < j, in row-major (i, j) order.
std::vector<double> pairwise_distances_serial(const RowMatrix& points);
std::vector<double> pairwise_distances_omp(const RowMatrix& points);

/// Row sums of K restricted to columns [begin, end).
void block_row_sums_serial(const Eigen::MatrixXd& k, Eigen::Index begin, Eigen::Index end,
                           Eigen::VectorXd& out);
void block_row_sums_omp(const Eigen::MatrixXd& k, Eigen::Index begin, Eigen::Index end,
                        Eigen::VectorXd& out);

/// Worker count an OpenMP region will use when entered from the current context.
int available_threads();

}  // namespace kmpe::kernels

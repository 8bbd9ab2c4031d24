#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace kmpe {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Ordered collection of d-dimensional points, one per row.
class SampleSet {
public:
    SampleSet() = default;
    explicit SampleSet(RowMatrix points) : points_(std::move(points)) {}
    SampleSet(std::size_t count, std::size_t dim)
        : points_(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim)) {}

    /// Builds from nested vectors; all rows must share one length.
    static SampleSet from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(points_.cols()); }
    bool empty() const noexcept { return points_.rows() == 0; }

    auto point(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)); }
    auto point(std::size_t i) { return points_.row(static_cast<Eigen::Index>(i)); }

    const RowMatrix& matrix() const noexcept { return points_; }
    RowMatrix& matrix() noexcept { return points_; }

    /// Rows of `a` followed by rows of `b`.
    static SampleSet concat(const SampleSet& a, const SampleSet& b);

    bool operator==(const SampleSet& other) const {
        return points_.rows() == other.points_.rows() && points_.cols() == other.points_.cols() &&
               points_ == other.points_;
    }

private:
    RowMatrix points_;
};

}  // namespace kmpe

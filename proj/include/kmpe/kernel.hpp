#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kmpe/sample_set.hpp"

namespace kmpe {

/// Selects the serial reference loops or the OpenMP kernels.
enum class Exec { serial, parallel };

/// Gaussian RBF bandwidth σ, k(a, b) = exp(-|a - b|^2 / (2σ^2)).
class KernelSpec {
public:
    /// Throws InputError unless sigma is finite and > 0.
    explicit KernelSpec(double sigma);

    double sigma() const noexcept { return sigma_; }
    double inv_two_sigma_sq() const noexcept { return 1.0 / (2.0 * sigma_ * sigma_); }

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

private:
    double sigma_;
};

/// Symmetric (n+m)x(n+m) kernel matrix over [mixture; component].
///
/// Rows/columns 0..n-1 are mixture samples, n..n+m-1 component samples. Matrices
/// built by `gram()` are exactly symmetric with unit diagonal and entries in (0, 1];
/// `from_matrix` accepts any exactly symmetric matrix (used for PSD test instances).
/// The block row sums K·[1_n; 0] and K·[0; 1_m] are cached at construction.
class GramMatrix {
public:
    static GramMatrix from_matrix(Eigen::MatrixXd k, std::size_t n, std::size_t m,
                                  Exec exec = Exec::parallel);

    std::size_t n() const noexcept { return n_; }
    std::size_t m() const noexcept { return m_; }
    std::size_t size() const noexcept { return n_ + m_; }
    const Eigen::MatrixXd& matrix() const noexcept { return k_; }
    double operator()(std::size_t i, std::size_t j) const {
        return k_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    const Eigen::VectorXd& mixture_row_sums() const noexcept { return mixture_sums_; }
    const Eigen::VectorXd& component_row_sums() const noexcept { return component_sums_; }

    /// Upper bound on the largest eigenvalue of K over sum-zero directions, the only
    /// directions a simplex-constrained quadratic ever moves along.
    double curvature_bound() const noexcept { return curvature_bound_; }
    /// Max absolute row sum of K (plain Gershgorin bound).
    double gershgorin_bound() const noexcept { return gershgorin_; }

    /// y = K x through the selected kernel.
    void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;

    Exec exec() const noexcept { return exec_; }

private:
    GramMatrix() = default;

    Eigen::MatrixXd k_;
    std::size_t n_ = 0;
    std::size_t m_ = 0;
    Eigen::VectorXd mixture_sums_;
    Eigen::VectorXd component_sums_;
    double gershgorin_ = 0.0;
    double curvature_bound_ = 0.0;
    Exec exec_ = Exec::parallel;
};

/// exp(-|a-b|^2/(2σ^2)). Throws InputError on dimension mismatch.
double rbf_kernel(std::span<const double> a, std::span<const double> b, const KernelSpec& spec);

/// Gram matrix over the concatenation [mixture; component].
GramMatrix gram(const SampleSet& mixture, const SampleSet& component, const KernelSpec& spec,
                Exec exec = Exec::parallel);

/// Points above this count are subsampled (seeded, without replacement) before
/// the median pairwise distance is taken.
inline constexpr std::size_t kMedianSubsampleLimit = 10000;

/// Median Euclidean distance over index pairs i < j.
double median_pairwise_distance(const SampleSet& points, Exec exec = Exec::parallel);

/// `count` bandwidths log-uniform on [0.1·median, 10·median], endpoints inclusive.
/// Throws DegenerateDataError when the median pairwise distance is 0.
std::vector<KernelSpec> bandwidth_grid(const SampleSet& all_points, std::size_t count = 5);

/// |phi(F^) - phi(H^)| = sqrt(mean K_FF - 2 mean K_FH + mean K_HH), radicand clamped at 0.
double empirical_mmd(const GramMatrix& k);

struct KernelSelection {
    KernelSpec spec;
    GramMatrix gram;
    double mmd;
    std::size_t index;           // position of `spec` in the grid
    std::vector<double> scores;  // empirical_mmd per grid entry, grid order
};

/// Grid entry maximizing empirical_mmd; ties go to the smallest sigma.
KernelSelection select_kernel(const SampleSet& mixture, const SampleSet& component,
                              const std::vector<KernelSpec>& grid, Exec exec = Exec::parallel);

}  // namespace kmpe

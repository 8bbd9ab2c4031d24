#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kmpe/estimators.hpp"
#include "kmpe/kernel.hpp"
#include "kmpe/sample_set.hpp"

namespace kmpe {

enum class EstimatorKind { km1, km2, value, fixed };

EstimatorKind parse_estimator_kind(std::string_view name);
std::string_view to_string(EstimatorKind kind);

/// Everything an end-to-end estimate depends on besides the data.
struct PipelineConfig {
    EstimatorOptions options;
    std::size_t bandwidth_count = 5;
    std::vector<double> sigmas;  // explicit grid; empty means median heuristic
    double tau = 0.1;            // value estimator
    double value_grid_step = 0.01;
    std::optional<double> fixed_nu;
    double km2_init_weight = 0.8;
    bool emit_curve = false;
    std::size_t curve_points = 101;  // uniform on [0, lambda_ub]

    void validate() const;
};

struct KernelChoice {
    std::vector<KernelSpec> grid;
    std::optional<double> median_distance;  // unset for explicit grids and the degenerate fallback
    KernelSelection selection;
    std::vector<std::string> warnings;
};

/// Bandwidth grid (median heuristic unless `config.sigmas` is set) and the
/// MMD-maximizing kernel. Data with zero median distance falls back to sigma = 1
/// with a warning.
KernelChoice choose_kernel(const SampleSet& mixture, const SampleSet& component,
                           const PipelineConfig& config);

struct PipelineResult {
    EstimateReport report;
    std::vector<KernelSpec> grid;
    std::vector<double> scores;
    std::optional<double> median_distance;
    double mmd = 0.0;
    std::optional<Km2Threshold> km2;
    std::size_t n = 0;
    std::size_t m = 0;
};

/// Threshold + estimator on an already chosen kernel.
PipelineResult run_estimator(const KernelChoice& choice, EstimatorKind kind, const PipelineConfig& config);

/// choose_kernel followed by run_estimator.
PipelineResult estimate(const SampleSet& mixture, const SampleSet& component, EstimatorKind kind,
                        const PipelineConfig& config);

/// `count` points uniform on [0, upper], both ends included.
std::vector<double> uniform_grid(double upper, std::size_t count);

}  // namespace kmpe

#include "kmpe/pipeline.hpp"

#include <cmath>

#include "kmpe/errors.hpp"

namespace kmpe {

namespace {

// Below this the mixture and component embeddings are treated as coincident.
constexpr double kDegenerateMmd = 1e-10;

}  // namespace

EstimatorKind parse_estimator_kind(std::string_view name) {
    if (name == "km1") return EstimatorKind::km1;
    if (name == "km2") return EstimatorKind::km2;
    if (name == "value") return EstimatorKind::value;
    if (name == "fixed") return EstimatorKind::fixed;
    throw InputError("unknown estimator '" + std::string(name) + "' (expected km1, km2, value or fixed)");
}

std::string_view to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::km1: return "km1";
        case EstimatorKind::km2: return "km2";
        case EstimatorKind::value: return "value";
        case EstimatorKind::fixed: return "fixed";
    }
    return "?";
}

void PipelineConfig::validate() const {
    if (!(options.eps > 0.0)) throw InputError("--eps must be positive");
    if (!(options.lambda_ub > 1.0 + options.eps)) throw InputError("--lambda-ub must exceed 1 + eps");
    if (!(options.qp.tol > 0.0)) throw InputError("--qp-tol must be positive");
    if (options.qp.max_iter == 0) throw InputError("--max-iter must be positive");
    if (bandwidth_count == 0) throw InputError("--bandwidths must be positive");
    for (double s : sigmas) KernelSpec{s};
    if (!(tau > 0.0)) throw InputError("--tau must be positive");
    if (!(value_grid_step > 0.0)) throw InputError("--grid-step must be positive");
    if (fixed_nu && !(*fixed_nu >= 0.0)) throw InputError("--nu must be >= 0");
    if (!(km2_init_weight >= 0.0 && km2_init_weight <= 1.0)) throw InputError("--km2-weight must lie in [0, 1]");
    if (emit_curve && curve_points < 2) throw InputError("--curve-points must be at least 2");
}

std::vector<double> uniform_grid(double upper, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = count == 1 ? 0.0 : upper * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return out;
}

KernelChoice choose_kernel(const SampleSet& mixture, const SampleSet& component, const PipelineConfig& config) {
    if (mixture.empty() || component.empty()) throw InputError("mixture and component samples must be non-empty");
    if (mixture.dim() != component.dim()) throw InputError("mixture and component dimensions differ");

    std::vector<KernelSpec> grid;
    std::optional<double> median;
    std::vector<std::string> warnings;
    if (!config.sigmas.empty()) {
        for (double s : config.sigmas) grid.emplace_back(s);
    } else {
        const SampleSet all = SampleSet::concat(mixture, component);
        try {
            median = median_pairwise_distance(all);
            grid = bandwidth_grid(all, config.bandwidth_count);
        } catch (const DegenerateDataError& e) {
            median.reset();
            grid = {KernelSpec(1.0)};
            warnings.emplace_back(std::string("degenerate data: ") + e.what() + "; using sigma = 1");
        }
    }
    KernelSelection selection = select_kernel(mixture, component, grid);
    return KernelChoice{std::move(grid), median, std::move(selection), std::move(warnings)};
}

PipelineResult run_estimator(const KernelChoice& choice, EstimatorKind kind, const PipelineConfig& config) {
    config.validate();
    const GramMatrix& k = choice.selection.gram;
    PipelineResult result{};
    result.grid = choice.grid;
    result.scores = choice.selection.scores;
    result.median_distance = choice.median_distance;
    result.mmd = choice.selection.mmd;
    result.n = k.n();
    result.m = k.m();

    EstimateReport report;
    switch (kind) {
        case EstimatorKind::km1:
            report = gradient_threshold_estimate(k, km1_threshold(k.n(), k.m()), config.options);
            break;
        case EstimatorKind::km2: {
            const Km2Threshold nu = km2_threshold(k, config.options.eps, config.km2_init_weight, config.options.qp);
            result.km2 = nu;
            report = gradient_threshold_estimate(k, nu.nu, config.options);
            report.qp_solves += 2;
            if (!nu.converged) {
                report.converged = false;
                report.warnings.emplace_back("initial-slope QP solves did not reach qp_tol");
            }
            break;
        }
        case EstimatorKind::fixed:
            if (!config.fixed_nu) throw InputError("fixed estimator needs --nu");
            report = gradient_threshold_estimate(k, *config.fixed_nu, config.options);
            break;
        case EstimatorKind::value:
            report = value_threshold_estimate(k, config.tau, config.value_grid_step, config.options);
            break;
    }
    report.estimator = std::string(to_string(kind));
    report.kernel = choice.selection.spec;
    report.warnings.insert(report.warnings.begin(), choice.warnings.begin(), choice.warnings.end());
    if (result.mmd < kDegenerateMmd) {
        report.warnings.emplace_back(
            "degenerate data: empirical MMD between mixture and component is ~0; estimate is uninformative");
    }
    if (config.emit_curve) report.curve = curve(k, uniform_grid(config.options.lambda_ub, config.curve_points),
                                                config.options.qp);
    result.report = std::move(report);
    return result;
}

PipelineResult estimate(const SampleSet& mixture, const SampleSet& component, EstimatorKind kind,
                        const PipelineConfig& config) {
    config.validate();
    return run_estimator(choose_kernel(mixture, component, config), kind, config);
}

}  // namespace kmpe

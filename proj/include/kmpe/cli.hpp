#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "kmpe/data_io.hpp"
#include "kmpe/pipeline.hpp"

namespace kmpe::cli {

struct EstimateCommand {
    std::filesystem::path mixture;
    std::filesystem::path component;
    EstimatorKind estimator = EstimatorKind::km2;
    PipelineConfig config;
    std::optional<std::filesystem::path> out;        // JSON report; stdout when unset
    std::optional<std::filesystem::path> curve_out;  // defaults next to `out`
};

struct EvalCommand {
    std::optional<std::filesystem::path> data;  // labeled CSV; synthetic pairs when unset
    double synth_kappa = 0.3;
    double synth_separation = 6.0;
    std::size_t synth_dim = 1;
    std::vector<std::size_t> sizes{400, 800, 1600, 3200};
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::vector<double> fractions{0.25, 0.5, 0.75};
    std::vector<bool> flips{false, true};
    std::vector<EstimatorKind> estimators{EstimatorKind::km1, EstimatorKind::km2};
    PipelineConfig config;
    std::filesystem::path out = "eval.csv";
    std::optional<int> threads;  // KMPE_THREADS, then logical cores, when unset
};

struct SynthCommand {
    SynthSpec spec;
    std::filesystem::path out_dir = ".";
};

/// One (instance, estimator) cell of an evaluation sweep.
struct EvalRow {
    std::string source;  // dataset path or "synthetic"
    std::optional<double> fraction;
    std::optional<bool> flip;
    std::size_t size = 0;
    std::uint64_t seed = 0;
    std::string estimator;
    std::size_t n = 0;
    std::size_t m = 0;
    std::optional<double> kappa_true;
    std::optional<double> kappa_realized;
    double kappa_hat = 0.0;
    double abs_error = 0.0;
    double lambda_hat = 0.0;
    double nu = 0.0;
    double sigma = 0.0;
    double mmd = 0.0;
    bool converged = false;
    std::string status = "ok";  // or "error: <message>"
};

struct EvalSummaryRow {
    std::string estimator;
    std::size_t size;
    std::size_t cells;
    std::size_t failures;
    double mean_abs_error;
};

/// Writes the JSON report (and curve CSV when requested); returns the result.
PipelineResult cmd_estimate(const EstimateCommand& cmd, std::ostream& log);

/// Runs the sweep, writes `out` (one row per cell) and `<out stem>.summary.csv`.
std::vector<EvalRow> cmd_eval(const EvalCommand& cmd, std::ostream& log);

/// Writes mixture.csv, component.csv and manifest.json into `out_dir`.
void cmd_synth(const SynthCommand& cmd, std::ostream& log);

nlohmann::ordered_json report_json(const PipelineResult& result, const EstimateCommand& cmd);
std::string eval_rows_csv(const std::vector<EvalRow>& rows);
std::vector<EvalSummaryRow> summarize(const std::vector<EvalRow>& rows);
std::string eval_summary_csv(const std::vector<EvalSummaryRow>& summary);
std::string curve_csv(const std::vector<DistanceEval>& curve);

/// Sweep worker count: explicit value, else KMPE_THREADS, else logical cores.
int resolve_worker_count(std::optional<int> requested);

/// Full command line. Returns the process exit code (0 iff no config/IO error).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kmpe::cli

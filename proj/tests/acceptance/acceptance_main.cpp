// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// Optional: KMPE_WAVEFORM_CSV=<labeled csv> adds the real-data check to
// criterion 6; without it that sub-check prints SKIP.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kmpe/cli.hpp"
#include "kmpe/data_io.hpp"
#include "kmpe/distance_curve.hpp"
#include "kmpe/estimators.hpp"
#include "kmpe/simplex_qp.hpp"
#include "test_support.hpp"

using namespace kmpe;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

// Shared by criteria 1, 2 and 5: random Gaussian instances, N <= 200, random sigma.
std::vector<GramMatrix> random_instances(std::uint64_t seed, int count) {
    std::mt19937_64 gen(seed);
    std::vector<GramMatrix> out;
    for (int i = 0; i < count; ++i) {
        const auto inst = testing::random_curve_instance(gen, 200);
        out.push_back(gram(inst.data.mixture, inst.data.component, KernelSpec(inst.sigma)));
    }
    return out;
}

Outcome zero_region(const std::vector<GramMatrix>& instances) {
    double worst = 0.0;
    for (const GramMatrix& k : instances)
        for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) worst = std::max(worst, d_hat(k, lambda).d_hat);
    return {worst <= 1e-6, fmt("%zu instances, max d_hat on [0,1] = %.3g (tol 1e-6)", instances.size(), worst)};
}

Outcome convex_monotone(const std::vector<GramMatrix>& instances) {
    double worst_first = std::numeric_limits<double>::infinity();
    double worst_second = std::numeric_limits<double>::infinity();
    for (const GramMatrix& k : instances) {
        std::vector<double> d;
        for (int i = 0; i <= 40; ++i) d.push_back(d_hat(k, 0.25 * i).d_hat);
        for (std::size_t i = 1; i < d.size(); ++i) worst_first = std::min(worst_first, d[i] - d[i - 1]);
        for (std::size_t i = 1; i + 1 < d.size(); ++i)
            worst_second = std::min(worst_second, d[i - 1] - 2.0 * d[i] + d[i + 1]);
    }
    return {worst_first >= -1e-6 && worst_second >= -1e-5,
            fmt("min first diff %.3g (tol -1e-6), min second diff %.3g (tol -1e-5)", worst_first, worst_second)};
}

Outcome qp_oracle() {
    std::mt19937_64 gen(3);
    std::uniform_int_distribution<std::size_t> total_dist(2, 4);
    std::uniform_real_distribution<double> lambda_dist(0.0, 10.0);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t total = total_dist(gen);
        std::uniform_int_distribution<std::size_t> n_dist(1, total - 1);
        const std::size_t n = n_dist(gen);
        const Eigen::MatrixXd km = testing::random_psd(total, gen);
        const Eigen::VectorXd u = make_u(lambda_dist(gen), n, total - n).u;
        const QpSolution sol = solve_qp(GramMatrix::from_matrix(km, n, total - n), u);
        worst = std::max(worst, std::abs(sol.objective - testing::simplex_grid_min(km, u, 1000)));
    }
    return {worst <= 1e-3, fmt("200 instances, n+m <= 4, grid step 1e-3: max |objective - grid| = %.3g (tol 1e-3)", worst)};
}

Outcome two_point() {
    double worst = 0.0;
    double worst_lambda = 0.0;
    for (double k : {0.1, 0.5, 0.9}) {
        const GramMatrix g = testing::two_point_gram(k);
        for (double lambda : {1.0, 1.5, 2.0, 5.0})
            worst = std::max(worst, std::abs(d_hat(g, lambda).d_hat - testing::two_point_distance(lambda, k)));
        const auto r = gradient_threshold_estimate(g, 0.5 * std::sqrt(2.0 - 2.0 * k));
        worst_lambda = std::max(worst_lambda, std::abs(r.lambda_hat - 1.0));
    }
    return {worst <= 1e-6 && worst_lambda <= 0.04,
            fmt("max |d_hat - (lambda-1)sqrt(2-2k)| = %.3g (tol 1e-6), max |lambda_hat - 1| = %.4f (tol 0.04)", worst,
                worst_lambda)};
}

Outcome slope_asymptote(const std::vector<GramMatrix>& instances) {
    double worst = 0.0;
    for (const GramMatrix& k : instances) worst = std::max(worst, std::abs(slope(k, 50.0, 0.04).value - empirical_mmd(k)));
    return {worst <= 1e-3, fmt("%zu instances, max |slope(50) - mmd| = %.3g (tol 1e-3)", instances.size(), worst)};
}

std::vector<cli::EvalSummaryRow> run_eval(cli::EvalCommand cmd, const fs::path& out) {
    cmd.out = out;
    std::ostringstream log;
    return cli::summarize(cli::cmd_eval(cmd, log));
}

double mean_error(const std::vector<cli::EvalSummaryRow>& summary, const std::string& estimator, std::size_t size) {
    for (const auto& s : summary)
        if (s.estimator == estimator && s.size == size) return s.failures == 0 ? s.mean_abs_error : std::nan("");
    return std::nan("");
}

Outcome convergence(const fs::path& dir) {
    cli::EvalCommand cmd;
    cmd.synth_kappa = 0.3;
    cmd.synth_separation = 6.0;
    cmd.synth_dim = 1;
    cmd.sizes = {400, 1600, 3200};
    cmd.seeds = {0, 1, 2, 3, 4};
    cmd.estimators = {EstimatorKind::km1, EstimatorKind::km2};
    const auto summary = run_eval(cmd, dir / "convergence.csv");
    bool pass = true;
    std::string detail;
    for (const char* est : {"km1", "km2"}) {
        const double e400 = mean_error(summary, est, 400);
        const double e1600 = mean_error(summary, est, 1600);
        const double e3200 = mean_error(summary, est, 3200);
        pass = pass && e3200 <= 0.10 && e3200 <= e400;
        detail += fmt("%s mean err 400/1600/3200 = %.4f/%.4f/%.4f; ", est, e400, e1600, e3200);
    }
    return {pass, detail + "need err(3200) <= 0.10 and <= err(400)"};
}

Outcome waveform(const fs::path& dir, const fs::path& data) {
    cli::EvalCommand cmd;
    cmd.data = data;
    cmd.sizes = {3200};
    cmd.estimators = {EstimatorKind::km2};
    const auto summary = run_eval(cmd, dir / "waveform.csv");
    const double e = mean_error(summary, "km2", 3200);
    return {e <= 0.05, fmt("%s km2 N=3200 mean err = %.4f (tol 0.05)", data.string().c_str(), e)};
}

Outcome determinism(const fs::path& dir) {
    cli::SynthCommand synth;
    synth.spec = SynthSpec{0.3, 2, 4.0, 150, 120, 11};
    synth.out_dir = dir / "det_data";
    std::ostringstream sink;
    cli::cmd_synth(synth, sink);

    auto estimate_bytes = [&](const std::string& tag) {
        cli::EstimateCommand cmd;
        cmd.mixture = synth.out_dir / "mixture.csv";
        cmd.component = synth.out_dir / "component.csv";
        cmd.estimator = EstimatorKind::km2;
        cmd.config.emit_curve = true;
        cmd.out = dir / ("det_" + tag + ".json");
        std::ostringstream log;
        cli::cmd_estimate(cmd, log);
        // The report names its own curve file; compare everything else byte for byte.
        std::string json = read_text_file(*cmd.out);
        const std::string curve_name = (dir / ("det_" + tag + ".curve.csv")).string();
        for (auto pos = json.find(curve_name); pos != std::string::npos; pos = json.find(curve_name))
            json.replace(pos, curve_name.size(), "<curve>");
        return json + read_text_file(dir / ("det_" + tag + ".curve.csv")) + log.str();
    };
    auto eval_bytes = [&](const std::string& tag, int threads) {
        cli::EvalCommand cmd;
        cmd.sizes = {100, 200};
        cmd.seeds = {0, 1, 2};
        cmd.threads = threads;
        cmd.out = dir / ("det_eval_" + tag + ".csv");
        std::ostringstream log;
        cli::cmd_eval(cmd, log);
        return read_text_file(cmd.out) + read_text_file(dir / ("det_eval_" + tag + ".summary.csv"));
    };
    const bool estimate_same = estimate_bytes("a") == estimate_bytes("b");
    const bool eval_same = eval_bytes("a", 1) == eval_bytes("b", 1);
    const bool eval_threads_same = eval_bytes("c", 4) == eval_bytes("a", 1);
    return {estimate_same && eval_same && eval_threads_same,
            fmt("estimate report+curve identical: %s; eval CSVs identical: %s; 1 vs 4 workers identical: %s",
                estimate_same ? "yes" : "no", eval_same ? "yes" : "no", eval_threads_same ? "yes" : "no")};
}

Outcome search_budget() {
    const EstimatorOptions defaults;
    const std::size_t planned = gradient_search_iterations(defaults);
    const std::size_t expected = static_cast<std::size_t>(std::ceil(std::log2(9.0 / 0.04)));
    std::mt19937_64 gen(8);
    const auto inst = testing::random_curve_instance(gen, 200);
    const GramMatrix k = gram(inst.data.mixture, inst.data.component, KernelSpec(inst.sigma));
    const auto r = gradient_threshold_estimate(k, km1_threshold(k.n(), k.m()), defaults);
    return {planned == 8 && expected == 8 && r.search_trace.size() == 8 && r.qp_solves == 16,
            fmt("planned %zu, performed %zu iterations, %zu QP solves (want 8 / 8 / 16)", planned, r.search_trace.size(),
                r.qp_solves)};
}

}  // namespace

int main() {
    const fs::path dir = fs::temp_directory_path() / "kmpe_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const std::vector<GramMatrix> instances = random_instances(2026, 20);
    const std::vector<GramMatrix> slope_instances = random_instances(515, 20);

    int failures = 0;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    };

    report(1, "zero region", [&] { return zero_region(instances); });
    report(2, "convex and non-decreasing", [&] { return convex_monotone(instances); });
    report(3, "qp grid oracle", qp_oracle);
    report(4, "two-point closed form", two_point);
    report(5, "slope asymptote", [&] { return slope_asymptote(slope_instances); });
    report(6, "statistical convergence", [&] { return convergence(dir); });
    if (const char* path = std::getenv("KMPE_WAVEFORM_CSV"); path && *path) {
        report(6, "waveform dataset", [&] { return waveform(dir, path); });
    } else {
        std::printf("[SKIP] 6 waveform dataset: set KMPE_WAVEFORM_CSV to a labeled CSV to run\n");
    }
    report(7, "determinism", [&] { return determinism(dir); });
    report(8, "binary-search budget", search_budget);

    fs::remove_all(dir);
    std::printf("%s: %d failing criteria\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}

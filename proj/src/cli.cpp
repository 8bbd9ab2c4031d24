#include "kmpe/cli.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"
#include "kmpe/errors.hpp"
#include "kmpe/rng.hpp"

namespace kmpe::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string num(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string opt_num(const std::optional<double>& value) { return value ? num(*value) : ""; }

fs::path with_suffix(const fs::path& base, const std::string& suffix) {
    fs::path out = base;
    out.replace_extension();
    out += suffix;
    return out;
}

fs::path curve_path(const EstimateCommand& cmd) {
    if (cmd.curve_out) return *cmd.curve_out;
    if (cmd.out) return with_suffix(*cmd.out, ".curve.csv");
    return "curve.csv";
}

ordered_json solver_json(const PipelineConfig& config) {
    return ordered_json{{"algorithm", to_string(config.options.qp.algorithm)},
                        {"qp_tol", config.options.qp.tol},
                        {"max_iter", config.options.qp.max_iter},
                        {"warm_start", config.options.warm_start}};
}

ordered_json config_json(const PipelineConfig& config) {
    return ordered_json{{"eps", config.options.eps},
                        {"lambda_ub", config.options.lambda_ub},
                        {"bandwidths", config.bandwidth_count},
                        {"sigmas", config.sigmas},
                        {"tau", config.tau},
                        {"grid_step", config.value_grid_step},
                        {"nu", config.fixed_nu ? ordered_json(*config.fixed_nu) : ordered_json(nullptr)},
                        {"km2_init_weight", config.km2_init_weight},
                        {"emit_curve", config.emit_curve},
                        {"curve_points", config.curve_points},
                        {"solver", solver_json(config)}};
}

struct EvalCell {
    std::optional<double> fraction;
    std::optional<bool> flip;
    std::size_t size;
    std::uint64_t seed;
};

std::vector<EvalRow> run_cell(const EvalCommand& cmd, const std::optional<LabeledDataset>& data,
                              const EvalCell& cell) {
    std::vector<EvalRow> rows;
    EvalRow base;
    base.source = cmd.data ? cmd.data->string() : "synthetic";
    base.fraction = cell.fraction;
    base.flip = cell.flip;
    base.size = cell.size;
    base.seed = cell.seed;
    try {
        MpeInstance inst;
        if (data) {
            inst = construct_instance(*data, InstanceSpec{*cell.fraction, *cell.flip, cell.size, cell.seed});
        } else {
            const std::size_t n = cell.size / 2;
            inst = synth_gaussian_pair(
                SynthSpec{cmd.synth_kappa, cmd.synth_dim, cmd.synth_separation, n, cell.size - n, cell.seed});
        }
        base.n = inst.mixture.size();
        base.m = inst.component.size();
        base.kappa_true = inst.kappa_true;
        base.kappa_realized = inst.kappa_realized;
        const KernelChoice choice = choose_kernel(inst.mixture, inst.component, cmd.config);
        for (const EstimatorKind kind : cmd.estimators) {
            EvalRow row = base;
            row.estimator = std::string(to_string(kind));
            try {
                const PipelineResult r = run_estimator(choice, kind, cmd.config);
                row.kappa_hat = r.report.kappa_hat;
                row.abs_error = inst.kappa_true ? std::abs(r.report.kappa_hat - *inst.kappa_true) : 0.0;
                row.lambda_hat = r.report.lambda_hat;
                row.nu = r.report.nu_or_tau;
                row.sigma = r.report.kernel->sigma();
                row.mmd = r.mmd;
                row.converged = r.report.converged;
            } catch (const std::exception& e) {
                row.status = std::string("error: ") + e.what();
            }
            rows.push_back(std::move(row));
        }
    } catch (const std::exception& e) {
        for (const EstimatorKind kind : cmd.estimators) {
            EvalRow row = base;
            row.estimator = std::string(to_string(kind));
            row.status = std::string("error: ") + e.what();
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

ordered_json report_json(const PipelineResult& result, const EstimateCommand& cmd) {
    const EstimateReport& r = result.report;
    ordered_json trace = ordered_json::array();
    for (const SearchStep& s : r.search_trace) {
        trace.push_back({{"lambda_curr", s.lambda_curr}, {"slope", s.slope}, {"converged", s.converged}});
    }
    std::vector<double> grid;
    for (const KernelSpec& k : result.grid) grid.push_back(k.sigma());

    ordered_json j;
    j["estimator"] = r.estimator;
    j["kappa_hat"] = r.kappa_hat;
    j["lambda_hat"] = r.lambda_hat;
    j["nu_or_tau"] = r.nu_or_tau;
    j["converged"] = r.converged;
    j["threshold_unreachable"] = r.threshold_unreachable;
    j["warnings"] = r.warnings;
    j["kernel"] = {{"sigma", r.kernel ? r.kernel->sigma() : 0.0},
                   {"mmd", result.mmd},
                   {"median_distance",
                    result.median_distance ? ordered_json(*result.median_distance) : ordered_json(nullptr)},
                   {"sigma_grid", grid},
                   {"mmd_scores", result.scores}};
    if (result.km2) {
        j["km2"] = {{"init_slope", result.km2->init_slope},
                    {"final_slope", result.km2->final_slope},
                    {"init_weight", cmd.config.km2_init_weight}};
    }
    j["search_trace"] = trace;
    j["qp"] = {{"solves", r.qp_solves}, {"iterations", r.qp_iterations}};
    j["data"] = {{"mixture", cmd.mixture.string()},
                 {"component", cmd.component.string()},
                 {"n", result.n},
                 {"m", result.m}};
    j["config"] = config_json(cmd.config);
    j["config"]["seeds"] = ordered_json::array();
    j["config"]["rng"] = std::string(Rng::kDescription);
    if (cmd.config.emit_curve) j["curve_csv"] = curve_path(cmd).string();
    return j;
}

std::string curve_csv(const std::vector<DistanceEval>& curve) {
    std::string out = "lambda,d_hat,converged\n";
    for (const DistanceEval& e : curve) {
        out += num(e.lambda) + "," + num(e.d_hat) + "," + (e.qp.converged ? "1" : "0") + "\n";
    }
    return out;
}

PipelineResult cmd_estimate(const EstimateCommand& cmd, std::ostream& log) {
    cmd.config.validate();
    const SampleSet mixture = load_samples_csv(cmd.mixture);
    const SampleSet component = load_samples_csv(cmd.component);
    if (mixture.dim() != component.dim()) {
        throw InputError("'" + cmd.mixture.string() + "' and '" + cmd.component.string() +
                         "' have different dimensions");
    }
    PipelineResult result = estimate(mixture, component, cmd.estimator, cmd.config);
    const std::string json = report_json(result, cmd).dump(2) + "\n";
    if (cmd.config.emit_curve) write_text_file(curve_path(cmd), curve_csv(result.report.curve));
    if (cmd.out) {
        write_text_file(*cmd.out, json);
        const EstimateReport& r = result.report;
        log << "kappa_hat=" << num(r.kappa_hat) << " lambda_hat=" << num(r.lambda_hat) << " "
            << r.estimator << "_threshold=" << num(r.nu_or_tau) << " sigma=" << num(r.kernel->sigma())
            << " mmd=" << num(result.mmd) << (r.converged ? "" : " (solver did not converge)") << "\n";
        for (const std::string& w : r.warnings) log << "warning: " << w << "\n";
    } else {
        log << json;
    }
    return result;
}

std::string eval_rows_csv(const std::vector<EvalRow>& rows) {
    std::string out =
        "source,fraction,flip,size,seed,estimator,n,m,kappa_true,kappa_realized,kappa_hat,abs_error,"
        "lambda_hat,nu,sigma,mmd,converged,status\n";
    for (const EvalRow& r : rows) {
        const bool ok = r.status == "ok";
        out += csv_field(r.source) + "," + opt_num(r.fraction) + "," +
               (r.flip ? (*r.flip ? "1" : "0") : "") + "," + std::to_string(r.size) + "," +
               std::to_string(r.seed) + "," + r.estimator + "," + std::to_string(r.n) + "," +
               std::to_string(r.m) + "," + opt_num(r.kappa_true) + "," + opt_num(r.kappa_realized) + ",";
        if (ok) {
            out += num(r.kappa_hat) + "," + num(r.abs_error) + "," + num(r.lambda_hat) + "," + num(r.nu) + "," +
                   num(r.sigma) + "," + num(r.mmd) + "," + (r.converged ? "1" : "0") + ",";
        } else {
            out += ",,,,,,,";
        }
        out += csv_field(r.status) + "\n";
    }
    return out;
}

std::vector<EvalSummaryRow> summarize(const std::vector<EvalRow>& rows) {
    std::vector<EvalSummaryRow> out;
    for (const EvalRow& r : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const EvalSummaryRow& s) {
            return s.estimator == r.estimator && s.size == r.size;
        });
        if (it == out.end()) {
            out.push_back({r.estimator, r.size, 0, 0, 0.0});
            it = std::prev(out.end());
        }
        if (r.status == "ok" && r.kappa_true) {
            it->mean_abs_error += r.abs_error;
            ++it->cells;
        } else {
            ++it->failures;
        }
    }
    for (EvalSummaryRow& s : out) {
        s.mean_abs_error = s.cells == 0 ? std::nan("") : s.mean_abs_error / static_cast<double>(s.cells);
    }
    return out;
}

std::string eval_summary_csv(const std::vector<EvalSummaryRow>& summary) {
    std::string out = "estimator,size,cells,failures,mean_abs_error\n";
    for (const EvalSummaryRow& s : summary) {
        out += s.estimator + "," + std::to_string(s.size) + "," + std::to_string(s.cells) + "," +
               std::to_string(s.failures) + "," + (std::isnan(s.mean_abs_error) ? "" : num(s.mean_abs_error)) +
               "\n";
    }
    return out;
}

int resolve_worker_count(std::optional<int> requested) {
    if (requested) {
        if (*requested < 1) throw InputError("--threads must be at least 1");
        return *requested;
    }
    if (const char* env = std::getenv("KMPE_THREADS")) {
        int value = 0;
        const std::string_view text(env);
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc{} || ptr != text.data() + text.size() || value < 1) {
            throw InputError("KMPE_THREADS must be a positive integer, got '" + std::string(text) + "'");
        }
        return value;
    }
    return std::max(1, omp_get_num_procs());
}

std::vector<EvalRow> cmd_eval(const EvalCommand& cmd, std::ostream& log) {
    cmd.config.validate();
    if (cmd.seeds.empty()) throw InputError("eval needs at least one seed");
    if (cmd.sizes.empty()) throw InputError("eval needs at least one sample size");
    if (cmd.estimators.empty()) throw InputError("eval needs at least one estimator");
    const int workers = resolve_worker_count(cmd.threads);

    std::optional<LabeledDataset> data;
    std::vector<EvalCell> cells;
    if (cmd.data) {
        if (cmd.fractions.empty() || cmd.flips.empty()) throw InputError("eval needs fractions and flips");
        data = load_labeled_csv(*cmd.data);
        for (std::size_t size : cmd.sizes)
            for (double fraction : cmd.fractions)
                for (bool flip : cmd.flips)
                    for (std::uint64_t seed : cmd.seeds) cells.push_back({fraction, flip, size, seed});
    } else {
        for (std::size_t size : cmd.sizes)
            for (std::uint64_t seed : cmd.seeds) cells.push_back({std::nullopt, std::nullopt, size, seed});
    }

    std::vector<std::vector<EvalRow>> results(cells.size());
    const auto cell_count = static_cast<std::ptrdiff_t>(cells.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers) if (workers > 1 && cell_count > 1)
    for (std::ptrdiff_t i = 0; i < cell_count; ++i) {
        results[static_cast<std::size_t>(i)] = run_cell(cmd, data, cells[static_cast<std::size_t>(i)]);
    }

    std::vector<EvalRow> rows;
    for (auto& cell_rows : results) {
        for (auto& row : cell_rows) rows.push_back(std::move(row));
    }
    const auto summary = summarize(rows);
    write_text_file(cmd.out, eval_rows_csv(rows));
    write_text_file(with_suffix(cmd.out, ".summary.csv"), eval_summary_csv(summary));

    log << "evaluated " << cells.size() << " cells x " << cmd.estimators.size() << " estimators\n";
    for (const EvalSummaryRow& s : summary) {
        log << "  " << s.estimator << " size=" << s.size << " mean|kappa_hat - kappa*|="
            << (std::isnan(s.mean_abs_error) ? std::string("n/a") : num(s.mean_abs_error)) << " over " << s.cells
            << " cells" << (s.failures ? " (" + std::to_string(s.failures) + " failed)" : "") << "\n";
    }
    return rows;
}

void cmd_synth(const SynthCommand& cmd, std::ostream& log) {
    const MpeInstance inst = synth_gaussian_pair(cmd.spec);
    std::error_code ec;
    fs::create_directories(cmd.out_dir, ec);
    if (ec) throw IoError("cannot create directory '" + cmd.out_dir.string() + "': " + ec.message());
    write_text_file(cmd.out_dir / "mixture.csv", format_samples_csv(inst.mixture));
    write_text_file(cmd.out_dir / "component.csv", format_samples_csv(inst.component));
    const ordered_json manifest{{"kappa_true", cmd.spec.kappa},
                                {"kappa_realized", *inst.kappa_realized},
                                {"seed", cmd.spec.seed},
                                {"dim", cmd.spec.dim},
                                {"separation", cmd.spec.separation},
                                {"n", cmd.spec.n},
                                {"m", cmd.spec.m},
                                {"rng", std::string(Rng::kDescription)},
                                {"mixture", "mixture.csv"},
                                {"component", "component.csv"}};
    write_text_file(cmd.out_dir / "manifest.json", manifest.dump(2) + "\n");
    log << "wrote " << cmd.spec.n << " mixture and " << cmd.spec.m << " component points to "
        << cmd.out_dir.string() << "\n";
}

namespace {

void add_numeric_flags(CLI::App& app, PipelineConfig& config, std::string& qp_algorithm) {
    app.add_option("--eps", config.options.eps, "Finite-difference width of the slope search")
        ->capture_default_str();
    app.add_option("--lambda-ub", config.options.lambda_ub, "Upper end of the lambda search")
        ->capture_default_str();
    app.add_option("--qp-tol", config.options.qp.tol, "QP suboptimality certificate target")
        ->capture_default_str();
    app.add_option("--max-iter", config.options.qp.max_iter, "QP budget in full-gradient units")
        ->capture_default_str();
    app.add_option("--qp-algorithm", qp_algorithm, "pairwise | accelerated_gradient")
        ->check(CLI::IsMember({"pairwise", "accelerated_gradient"}))
        ->capture_default_str();
    app.add_option("--bandwidths", config.bandwidth_count, "Size of the median-heuristic sigma grid")
        ->capture_default_str();
    app.add_option("--sigmas", config.sigmas, "Explicit sigma grid (overrides --bandwidths)")->delimiter(',');
    app.add_option("--tau", config.tau, "Value-threshold tau (estimator=value)")->capture_default_str();
    app.add_option("--grid-step", config.value_grid_step, "Resolution of the value-threshold search")
        ->capture_default_str();
    app.add_option("--km2-weight", config.km2_init_weight, "KM2 weight on the initial slope")
        ->capture_default_str();
    app.add_flag("--no-warm-start", [&config](std::int64_t) { config.options.warm_start = false; },
                 "Solve every QP from a cold start");
}

QpAlgorithm parse_algorithm(const std::string& name) {
    return name == "accelerated_gradient" ? QpAlgorithm::accelerated_gradient : QpAlgorithm::pairwise;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kernel mean embedding mixture proportion estimation"};
    app.require_subcommand(1);

    EstimateCommand est;
    std::string est_estimator = "km2";
    std::string est_algorithm = "pairwise";
    std::optional<double> est_nu;
    std::string est_out;
    std::string est_curve_out;
    auto* estimate_app = app.add_subcommand("estimate", "Estimate kappa from mixture and component CSV files");
    estimate_app->add_option("--mixture", est.mixture, "CSV of mixture samples")->required();
    estimate_app->add_option("--component", est.component, "CSV of component samples")->required();
    estimate_app->add_option("--estimator", est_estimator, "km1 | km2 | value | fixed")->capture_default_str();
    estimate_app->add_option("--nu", est_nu, "Gradient threshold (estimator=fixed)");
    estimate_app->add_option("--out", est_out, "JSON report path (stdout when omitted)");
    estimate_app->add_flag("--emit-curve", est.config.emit_curve, "Also write (lambda, d_hat) samples as CSV");
    estimate_app->add_option("--curve-points", est.config.curve_points, "Curve samples on [0, lambda_ub]")
        ->capture_default_str();
    estimate_app->add_option("--curve-out", est_curve_out, "Curve CSV path");
    add_numeric_flags(*estimate_app, est.config, est_algorithm);

    EvalCommand ev;
    std::string ev_estimators = "km1,km2";
    std::string ev_algorithm = "pairwise";
    std::string ev_data;
    std::vector<int> ev_flips{0, 1};
    std::optional<double> ev_nu;
    std::optional<int> ev_threads;
    std::string ev_out = "eval.csv";
    auto* eval_app = app.add_subcommand("eval", "Multi-seed evaluation sweep");
    eval_app->add_option("--data", ev_data, "Labeled CSV (label in last column); synthetic when omitted");
    eval_app->add_option("--synth-kappa", ev.synth_kappa)->capture_default_str();
    eval_app->add_option("--synth-separation", ev.synth_separation)->capture_default_str();
    eval_app->add_option("--synth-dim", ev.synth_dim)->capture_default_str();
    eval_app->add_option("--sizes", ev.sizes, "Total samples per instance")->delimiter(',');
    eval_app->add_option("--seeds", ev.seeds, "Random seeds")->delimiter(',');
    eval_app->add_option("--fractions", ev.fractions, "Positive fractions moved to the component")
        ->delimiter(',');
    eval_app->add_option("--flips", ev_flips, "Label flips to run (0, 1)")->delimiter(',');
    eval_app->add_option("--estimator", ev_estimators, "Comma list of km1, km2, value, fixed")
        ->capture_default_str();
    eval_app->add_option("--nu", ev_nu, "Gradient threshold (estimator=fixed)");
    eval_app->add_option("--threads", ev_threads, "Sweep workers (default KMPE_THREADS or cores)");
    eval_app->add_option("--out", ev_out, "Per-cell CSV; aggregates go to <stem>.summary.csv")
        ->capture_default_str();
    add_numeric_flags(*eval_app, ev.config, ev_algorithm);

    SynthCommand syn;
    std::string syn_out = ".";
    auto* synth_app = app.add_subcommand("synth", "Write a synthetic Gaussian mixture/component pair");
    synth_app->add_option("--kappa", syn.spec.kappa)->capture_default_str();
    synth_app->add_option("--dim", syn.spec.dim)->capture_default_str();
    synth_app->add_option("--separation", syn.spec.separation)->capture_default_str();
    synth_app->add_option("--n", syn.spec.n, "Mixture size")->capture_default_str();
    synth_app->add_option("--m", syn.spec.m, "Component size")->capture_default_str();
    synth_app->add_option("--seed", syn.spec.seed)->capture_default_str();
    synth_app->add_option("--out", syn_out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*estimate_app) {
            est.estimator = parse_estimator_kind(est_estimator);
            est.config.fixed_nu = est_nu;
            est.config.options.qp.algorithm = parse_algorithm(est_algorithm);
            if (!est_out.empty()) est.out = est_out;
            if (!est_curve_out.empty()) est.curve_out = est_curve_out;
            cmd_estimate(est, out);
        } else if (*eval_app) {
            ev.estimators.clear();
            std::stringstream list(ev_estimators);
            for (std::string name; std::getline(list, name, ',');) {
                ev.estimators.push_back(parse_estimator_kind(name));
            }
            ev.flips.clear();
            for (int f : ev_flips) {
                if (f != 0 && f != 1) throw InputError("--flips entries must be 0 or 1");
                ev.flips.push_back(f == 1);
            }
            ev.config.fixed_nu = ev_nu;
            ev.config.options.qp.algorithm = parse_algorithm(ev_algorithm);
            if (!ev_data.empty()) ev.data = ev_data;
            ev.out = ev_out;
            ev.threads = ev_threads;
            cmd_eval(ev, out);
        } else if (*synth_app) {
            syn.out_dir = syn_out;
            cmd_synth(syn, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace kmpe::cli

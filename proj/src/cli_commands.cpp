#include "larn/cli_commands.hpp"

#include "larn/csv.hpp"
#include "larn/errors.hpp"
#include "larn/larn_estimator.hpp"
#include "larn/model_selection.hpp"
#include "larn/scalar_rule.hpp"
#include "larn/serialize.hpp"
#include "larn/simbench.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>

namespace larn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct PenaltyFlags {
    std::string depth = "halfspace";
    std::string transform = "max";
    double projection_c = 0.0; // 0 selects Phi^{-1}(3/4)

    void add(CLI::App* app)
    {
        app->add_option("--depth", depth, "Depth family")->check(CLI::IsMember({"halfspace", "projection"}));
        app->add_option("--transform", transform, "Inverse-depth transform")->check(CLI::IsMember({"max", "exp"}));
        app->add_option("--projection-c", projection_c, "Projection depth constant (default: 3/4 normal quantile)");
    }

    PenaltySpec spec() const
    {
        PenaltySpec s;
        s.family.kind = parse_depth_kind(depth);
        if (projection_c > 0.0) s.family.c = projection_c;
        s.transform = parse_transform(transform);
        s.validate();
        return s;
    }
};

struct FitFlags {
    std::string x_path;
    std::string y_path;
    std::string out_dir = ".";
    PenaltyFlags penalty;
    std::string lambda_scale = "log10-n";
    std::vector<double> lambdas;
    int n_lambdas = 100;
    int n_thresholds = 100;
    int folds = 5;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string one_step = "true";
    std::optional<double> fixed_lambda;
    double fixed_threshold = 0.0;

    void add(CLI::App* app, bool allow_fixed)
    {
        app->add_option("--x", x_path, "Design matrix CSV")->required();
        app->add_option("--y", y_path, "Response matrix CSV")->required();
        app->add_option("--out-dir", out_dir, "Output directory");
        penalty.add(app);
        app->add_option("--lambda-scale", lambda_scale, "Lambda grid reading")
            ->check(CLI::IsMember({"log10", "log10-n", "linear-positive"}));
        app->add_option("--lambdas", lambdas, "Explicit ascending lambda grid, comma separated")->delimiter(',');
        app->add_option("--n-lambdas", n_lambdas, "Lambda grid size");
        app->add_option("--n-thresholds", n_thresholds, "Threshold grid size");
        app->add_option("--folds", folds, "Cross-validation folds");
        app->add_option("--seed", seed, "Fold assignment seed");
        app->add_option("--jobs", jobs, "Maximum concurrent tasks")->check(CLI::PositiveNumber);
        app->add_option("--one-step", one_step, "One-step estimator or full MM iteration")
            ->check(CLI::IsMember({"true", "false"}));
        if (allow_fixed) {
            app->add_option("--lambda", fixed_lambda, "Skip cross-validation and fit at this lambda");
            app->add_option("--threshold", fixed_threshold, "Within-row threshold used with --lambda");
        }
    }

    LarnConfig config() const
    {
        LarnConfig c;
        c.penalty = penalty.spec();
        c.one_step = one_step == "true";
        return c;
    }

    CvGrid grid() const
    {
        CvGrid g;
        g.lambdas = lambdas;
        g.lambda_scale = parse_lambda_scale(lambda_scale);
        g.lambda_count = n_lambdas;
        g.threshold_count = n_thresholds;
        g.k = folds;
        g.seed = seed;
        return g;
    }
};

Dataset load_dataset(const FitFlags& f, std::vector<std::string>* response_names)
{
    for (const auto& path : {f.x_path, f.y_path}) {
        if (!fs::exists(path)) throw IoError("no such file: " + path);
    }
    CsvMatrix x = read_matrix_csv(f.x_path);
    CsvMatrix y = read_matrix_csv(f.y_path);
    if (x.values.rows() != y.values.rows()) {
        throw IoError("row count mismatch: " + f.x_path + " has " + std::to_string(x.values.rows()) + " data rows, "
                      + f.y_path + " has " + std::to_string(y.values.rows()));
    }
    if (response_names) *response_names = y.header;
    Dataset d{std::move(x.values), std::move(y.values)};
    d.validate();
    return d;
}

void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

json read_json(const std::string& path)
{
    if (!fs::exists(path)) throw IoError("no such file: " + path);
    std::ifstream in(path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": invalid JSON: " + e.what());
    }
}

void report_warnings(const std::vector<std::string>& warnings, std::ostream& err)
{
    for (const auto& w : warnings) err << "warning: " << w << "\n";
}

int cmd_fit(const FitFlags& f, std::ostream& err)
{
    std::vector<std::string> names;
    const Dataset data = load_dataset(f, &names);
    const LarnConfig config = f.config();
    ensure_dir(f.out_dir);

    FitResult fit;
    json sidecar;
    if (f.fixed_lambda) {
        fit = larn_fit(data, config, *f.fixed_lambda);
        fit.threshold = f.fixed_threshold;
        fit.B_hat = apply_threshold(fit.B_one_step, f.fixed_threshold);
        sidecar = to_json(fit);
    } else {
        CvOptions opts;
        opts.jobs = f.jobs;
        const CvResult cv = cross_validate(data, config, f.grid(), opts);
        fit = refit_best(data, config, cv);
        sidecar = to_json(fit);
        sidecar["cv_rmse"] = cv.best_error;
        sidecar["folds"] = f.folds;
    }
    sidecar["depth"] = f.penalty.depth;
    sidecar["transform"] = f.penalty.transform;
    sidecar["one_step"] = config.one_step;
    report_warnings(fit.warnings, err);

    write_matrix_csv(fs::path(f.out_dir) / "B_hat.csv", fit.B_hat, names);
    write_text(fs::path(f.out_dir) / "fit.json", sidecar.dump(2) + "\n");
    return exit_ok;
}

int cmd_cv(const FitFlags& f)
{
    const Dataset data = load_dataset(f, nullptr);
    ensure_dir(f.out_dir);
    CvOptions opts;
    opts.jobs = f.jobs;
    const CvResult cv = cross_validate(data, f.config(), f.grid(), opts);
    write_text(fs::path(f.out_dir) / "cv_surface.csv", cv_surface_csv(cv));
    write_text(fs::path(f.out_dir) / "cv.json", to_json(cv).dump(2) + "\n");
    return exit_ok;
}

std::vector<std::string> names(const char* prefix, Index count)
{
    std::vector<std::string> out;
    for (Index i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, std::optional<std::uint64_t> seed)
{
    SimConfig cfg = sim_config_from_json(read_json(config_path));
    if (seed) cfg.seed = *seed;
    ensure_dir(out_dir);
    const SimInstance inst = generate_instance(cfg);
    write_matrix_csv(fs::path(out_dir) / "X.csv", inst.data.X, names("x", cfg.p));
    write_matrix_csv(fs::path(out_dir) / "Y.csv", inst.data.Y, names("y", cfg.q));
    write_matrix_csv(fs::path(out_dir) / "B0.csv", inst.B0, names("y", cfg.q));
    return exit_ok;
}

int cmd_benchmark(const std::string& config_path, const std::string& out_path, int jobs, bool full,
                  std::ostream& err)
{
    const BenchmarkConfig bc = benchmark_config_from_json(read_json(config_path), full);
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + out_path);
    out << metrics_csv_header() << "\n" << std::flush;

    BenchmarkOptions opts;
    opts.methods = bc.methods;
    opts.grid.lambda_scale = bc.lambda_scale;
    opts.jobs = jobs;
    auto sink = [&out](const MetricsRow& row) { out << metrics_csv_line(row) << "\n" << std::flush; };
    auto progress = [&err](const std::string& msg) { err << msg << "\n"; };
    for (const auto& [p, q] : bc.settings) {
        for (double rho : bc.rhos) {
            SimConfig cfg = bc.base;
            cfg.p = p;
            cfg.q = q;
            cfg.rho = rho;
            opts.setting.clear();
            run_benchmark(cfg, opts, sink, progress);
        }
    }
    if (!out) throw IoError("write failed: " + out_path);
    return exit_ok;
}

struct ScalarFlags {
    std::string penalty = "depth";
    PenaltyFlags depth;
    double a = 3.7;
    double shape_lambda = 1.0;

    void add(CLI::App* app)
    {
        app->add_option("--penalty", penalty, "Derivative used by the rule")
            ->check(CLI::IsMember({"depth", "scad", "mcp"}));
        depth.add(app);
        app->add_option("--scad-a", a, "SCAD a parameter");
        app->add_option("--shape-lambda", shape_lambda, "SCAD/MCP lambda parameter");
    }

    ScalarPenalty build() const
    {
        ScalarPenalty pen;
        if (penalty == "scad") pen = ScalarPenalty::scad(a, shape_lambda);
        else if (penalty == "mcp") pen = ScalarPenalty::mcp(shape_lambda);
        else pen = ScalarPenalty::depth_based(depth.spec());
        pen.validate();
        return pen;
    }
};

int cmd_threshold_curve(const ScalarFlags& sf, double lambda, double zmax, double step, const std::string& variant,
                        const std::string& out_path, std::ostream& out)
{
    if (!(step > 0.0) || !(zmax >= 0.0) || !(lambda >= 0.0)) {
        throw ConfigError("threshold-curve: need step > 0, zmax >= 0, lambda >= 0");
    }
    const ScalarPenalty pen = sf.build();
    const RuleVariant rv = variant == "fixed-point" ? RuleVariant::FixedPoint : RuleVariant::Approximate;
    const long half = std::lround(zmax / step);
    std::string text = "z,theta_hat\n";
    for (long i = -half; i <= half; ++i) {
        const double z = static_cast<double>(i) * step;
        text += format_double(z) + "," + format_double(soft_threshold_depth(z, lambda, pen, rv)) + "\n";
    }
    if (out_path.empty() || out_path == "-") {
        out << text;
    } else {
        write_text(out_path, text);
    }
    return exit_ok;
}

std::vector<double> theta_preset(const std::string& name, Index n)
{
    std::vector<double> theta(static_cast<std::size_t>(n), 0.0);
    if (name == "ones") {
        std::fill(theta.begin(), theta.end(), 1.0);
    } else if (name == "half-three") {
        for (Index i = n / 2; i < n; ++i) theta[static_cast<std::size_t>(i)] = 3.0;
    } else if (name != "zero") {
        throw ConfigError("unknown theta preset '" + name + "' (expected zero, ones or half-three)");
    }
    return theta;
}

int cmd_minimax_check(const ScalarFlags& sf, Index n, const std::string& preset, const std::string& theta_csv,
                      int replications, std::uint64_t seed, int jobs, const std::string& out_path,
                      std::ostream& out)
{
    std::vector<double> theta;
    if (!theta_csv.empty()) {
        if (!fs::exists(theta_csv)) throw IoError("no such file: " + theta_csv);
        const CsvMatrix m = read_matrix_csv(theta_csv);
        if (m.values.cols() != 1) throw ConfigError(theta_csv + ": expected a single column of theta values");
        theta.assign(m.values.data(), m.values.data() + m.values.size());
    } else {
        theta = theta_preset(preset, n);
    }
    const RiskReport report = minimax_check(theta, sf.build(), replications, seed, jobs);
    const std::string text = to_json(report).dump(2) + "\n";
    if (out_path.empty() || out_path == "-") {
        out << text;
    } else {
        write_text(out_path, text);
    }
    return exit_ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Depth-penalized multitask sparse regression"};
    app.require_subcommand(1);

    FitFlags fit_flags;
    auto* fit = app.add_subcommand("fit", "Cross-validate and fit on CSV data; writes B_hat.csv and fit.json");
    fit_flags.add(fit, true);

    FitFlags cv_flags;
    auto* cv = app.add_subcommand("cv", "Cross-validation error surface; writes cv_surface.csv and cv.json");
    cv_flags.add(cv, false);

    std::string sim_config, sim_out = ".";
    std::optional<std::uint64_t> sim_seed;
    auto* simulate = app.add_subcommand("simulate", "Generate X.csv, Y.csv, B0.csv from a JSON config");
    simulate->add_option("--config", sim_config, "Simulation config JSON")->required();
    simulate->add_option("--out-dir", sim_out, "Output directory");
    simulate->add_option("--seed", sim_seed, "Override the config seed");

    std::string bench_config, bench_out = "metrics.csv";
    int bench_jobs = 1;
    bool bench_full = false;
    auto* bench = app.add_subcommand("benchmark", "Run the simulation study; writes a long-format metrics CSV");
    bench->add_option("--config", bench_config, "Benchmark config JSON")->required();
    bench->add_option("--out", bench_out, "Metrics CSV path");
    bench->add_option("--jobs", bench_jobs, "Concurrent replications")->check(CLI::PositiveNumber);
    bench->add_flag("--full", bench_full, "100 replications over all four (p, q) settings unless overridden");

    ScalarFlags curve_pen;
    double curve_lambda = 1.0, curve_zmax = 5.0, curve_step = 0.01;
    std::string curve_variant = "approx", curve_out;
    auto* curve = app.add_subcommand("threshold-curve", "Emit (z, theta_hat) pairs of the scalar rule as CSV");
    curve_pen.add(curve);
    curve->add_option("--lambda", curve_lambda, "Rule lambda");
    curve->add_option("--zmax", curve_zmax, "Curve spans [-zmax, zmax]");
    curve->add_option("--step", curve_step, "Grid step");
    curve->add_option("--variant", curve_variant, "Rule variant")->check(CLI::IsMember({"approx", "fixed-point"}));
    curve->add_option("--out", curve_out, "Output CSV (default stdout)");

    ScalarFlags mm_pen;
    Index mm_n = 1024;
    std::string mm_theta = "zero", mm_theta_csv, mm_out;
    int mm_reps = 2000, mm_jobs = 1;
    std::uint64_t mm_seed = 1;
    auto* minimax = app.add_subcommand("minimax-check", "Monte Carlo risk against the minimax bound; JSON report");
    mm_pen.add(minimax);
    minimax->add_option("--n", mm_n, "Number of means");
    minimax->add_option("--theta", mm_theta, "Preset: zero, ones, half-three");
    minimax->add_option("--theta-csv", mm_theta_csv, "Single-column CSV of theta values (overrides --n/--theta)");
    minimax->add_option("--replications", mm_reps, "Monte Carlo replications");
    minimax->add_option("--seed", mm_seed, "Seed");
    minimax->add_option("--jobs", mm_jobs, "Concurrent replications")->check(CLI::PositiveNumber);
    minimax->add_option("--out", mm_out, "Output JSON (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    }

    try {
        if (*fit) return cmd_fit(fit_flags, err);
        if (*cv) return cmd_cv(cv_flags);
        if (*simulate) return cmd_simulate(sim_config, sim_out, sim_seed);
        if (*bench) return cmd_benchmark(bench_config, bench_out, bench_jobs, bench_full, err);
        if (*curve) return cmd_threshold_curve(curve_pen, curve_lambda, curve_zmax, curve_step, curve_variant, curve_out, out);
        if (*minimax) {
            return cmd_minimax_check(mm_pen, mm_n, mm_theta, mm_theta_csv, mm_reps, mm_seed, mm_jobs, mm_out, out);
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_numeric;
    }
    return exit_io;
}

} // namespace larn::cli

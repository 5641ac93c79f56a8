#include "zonopriv/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "zonopriv/bench.hpp"
#include "zonopriv/json_io.hpp"
#include "zonopriv/kernels.hpp"
#include "zonopriv/mechanisms.hpp"

namespace zonopriv {

namespace {

namespace fs = std::filesystem;

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScheduleFlags {
    TrainingSchedule schedule;
    std::string optimizer = "adam";
    int half_bins = 0;

    TrainingSchedule resolve() const
    {
        TrainingSchedule s = schedule;
        if (optimizer == "adam")
            s.optimizer = Optimizer::Adam;
        else if (optimizer == "gd")
            s.optimizer = Optimizer::GradientDescent;
        else
            throw ValidationError("--optimizer must be adam or gd");
        try {
            s.validate();
        } catch (const std::invalid_argument& e) {
            throw ValidationError(e.what());
        }
        return s;
    }
};

struct CommonFlags {
    std::uint64_t seed = 0;
    int verbosity = 0;
    std::string out;
};

struct IO {
    std::ostream& out;
    std::ostream& err;
    int verbosity = 0;
};

void add_schedule_options(CLI::App* app, ScheduleFlags& f)
{
    auto& s = f.schedule;
    app->add_option("--epochs", s.epochs, "Training epochs")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--learning-rate", s.learning_rate, "Optimizer step size")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--omega-start", s.omega_start, "Initial utility weight")->capture_default_str()->check(CLI::NonNegativeNumber);
    app->add_option("--omega-min", s.omega_min, "Utility weight floor")->capture_default_str()->check(CLI::NonNegativeNumber);
    app->add_option("--gamma-decay", s.gamma_decay, "Epochs per halving of the utility weight")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--gamma-norm", s.gamma_norm, "Utility norm (1 or 2)")->capture_default_str()->check(CLI::IsMember({1, 2}));
    app->add_option("--depth", s.depth, "Number of sigmoid terms")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--steepness", s.steepness, "Sigmoid steepness C")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--optimizer", f.optimizer, "adam or gd")->capture_default_str()->check(CLI::IsMember({"adam", "gd"}));
    app->add_option("--half-bins", f.half_bins, "Bins per half grid N (0 picks the smallest aligned N >= 200)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
}

void add_common(CLI::App* app, CommonFlags& c, bool out_required, const std::string& out_help)
{
    auto* o = app->add_option("--out", c.out, out_help);
    if (out_required)
        o->required();
    app->add_option("--seed", c.seed, "Base random seed (ZONOPRIV_SEED overrides)")->capture_default_str();
    app->add_flag("-v,--verbose", c.verbosity, "More diagnostics on stderr (repeatable)");
}

void apply_seed_env(CommonFlags& c)
{
    const char* env = std::getenv("ZONOPRIV_SEED");
    if (env == nullptr || *env == '\0')
        return;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(env, &used, 10);
        if (used != std::string(env).size())
            throw std::invalid_argument("trailing characters");
        c.seed = v;
    } catch (const std::exception&) {
        throw ValidationError(std::string("ZONOPRIV_SEED must be a non-negative integer, got '") + env + "'");
    }
}

void require(bool ok, const std::string& message)
{
    if (!ok)
        throw ValidationError(message);
}

NoiseGrid grid_for(double d, double s, int half_bins)
{
    if (half_bins == 0)
        return build_grid(d, default_half_bins(d, s));
    const NoiseGrid grid = build_grid(d, half_bins);
    try {
        (void)bin_shift(grid, s);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("--half-bins: ") + e.what());
    }
    return grid;
}

struct ProgressContext {
    std::ostream* err;
    int epochs;
    std::string label;
};

void training_progress(int epoch, const LossTerms& terms, void* user)
{
    const auto* ctx = static_cast<const ProgressContext*>(user);
    *ctx->err << ctx->label << ": epoch " << epoch + 1 << '/' << ctx->epochs << " loss=" << terms.loss
              << " delta=" << terms.delta << " utility=" << terms.utility << '\n';
}

TrainedNoise train_noise(const IO& io, double eps, double d, double s, const ScheduleFlags& flags, std::uint64_t seed)
{
    const TrainingSchedule schedule = flags.resolve();
    const NoiseGrid grid = grid_for(d, s, flags.half_bins);
    ProgressContext ctx{&io.err, schedule.epochs, "train eps=" + std::to_string(eps) + " d=" + std::to_string(d)};
    return train_in_sensitivity_units(d, grid.half_bins, eps, s, schedule, seed, training_progress, &ctx);
}

TruncatedDistribution matched_laplace(const TruncatedDistribution& optimal)
{
    const double a = truncated_laplace_range(optimal.epsilon(), optimal.delta(), optimal.sensitivity());
    const NoiseGrid grid = aligned_grid_for_range(a, optimal.sensitivity());
    return truncated_laplace_distribution(grid, optimal.epsilon(), optimal.sensitivity());
}

TruncatedDistribution load_distribution(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open noise file '" + path + "'");
    try {
        json j;
        in >> j;
        return distribution_from_json(j);
    } catch (const json::exception& e) {
        throw ValidationError("noise file '" + path + "': " + e.what());
    } catch (const std::invalid_argument& e) {
        throw ValidationError("noise file '" + path + "': " + e.what());
    }
}

std::string dump_line(const json& j) { return j.dump() + "\n"; }

// --- optimize-noise --------------------------------------------------------

struct OptimizeFlags {
    CommonFlags common;
    ScheduleFlags schedule;
    double epsilon = 0.0;
    double range = 0.0;
    double sensitivity = 1.0;
};

int cmd_optimize(OptimizeFlags& f, const IO& io)
{
    require(std::isfinite(f.epsilon) && f.epsilon > 0.0, "--epsilon must be a positive finite number");
    require(std::isfinite(f.range) && f.range > 0.0, "--range must be a positive finite number");
    require(std::isfinite(f.sensitivity) && f.sensitivity > 0.0, "--sensitivity must be positive");
    (void)f.schedule.resolve();
    (void)grid_for(f.range, f.sensitivity, f.schedule.half_bins);

    const TrainedNoise trained = train_noise(io, f.epsilon, f.range, f.sensitivity, f.schedule, f.common.seed);
    const TruncatedDistribution& dist = trained.distribution;
    write_file_atomic(f.common.out, distribution_to_json(dist).dump(2) + "\n");
    if (dist.degenerate())
        io.err << "warning: training ended with delta = 1 (degenerate distribution)\n";
    io.out << dump_line(json{{"delta", dist.delta()}, {"epsilon", dist.epsilon()}, {"d", dist.range()},
        {"s", dist.sensitivity()}, {"N", dist.grid().half_bins}, {"best_epoch", trained.report.best_epoch},
        {"best_loss", trained.report.best_loss}, {"degenerate", dist.degenerate()}, {"out", f.common.out}});
    return ExitOk;
}

// --- run-estimator / compare-laplace ---------------------------------------

struct EstimatorFlags {
    CommonFlags common;
    ScheduleFlags schedule;
    std::string scenario = "quadcopter";
    std::string privacy_model = "cdp";
    std::string noise_path;
    std::string noise_type = "optimal";
    std::optional<double> epsilon;
    std::optional<double> range;
    std::optional<double> sensitivity;
    std::optional<int> horizon;
    int seeds = 20;
    int reduction_order = 5;
    int jobs = 0;
};

Scenario resolve_scenario(const EstimatorFlags& f)
{
    Scenario sc = [&] {
        try {
            if (f.scenario == "quadcopter" || f.scenario == "rotating_object" || f.scenario == "rotating-object")
                return scenario_by_name(f.scenario, f.common.seed);
            if (!fs::exists(f.scenario))
                throw std::invalid_argument("unknown scenario or missing file '" + f.scenario + "'");
            return load_scenario_file(f.scenario);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(e.what());
        }
    }();
    if (f.epsilon)
        sc.privacy.epsilon = *f.epsilon;
    if (f.range)
        sc.privacy.range = *f.range;
    if (f.sensitivity)
        sc.privacy.sensitivity = *f.sensitivity;
    if (f.horizon)
        sc.horizon = *f.horizon;
    require(std::isfinite(sc.privacy.epsilon) && sc.privacy.epsilon > 0.0, "--epsilon must be positive");
    require(std::isfinite(sc.privacy.range) && sc.privacy.range > 0.0, "--range must be positive");
    require(std::isfinite(sc.privacy.sensitivity) && sc.privacy.sensitivity > 0.0, "--sensitivity must be positive");
    return sc;
}

int resolved_jobs(int jobs)
{
    if (jobs > 0)
        return jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<std::uint64_t> seed_list(std::uint64_t base, int count)
{
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < count; ++i)
        seeds.push_back(base + static_cast<std::uint64_t>(i));
    return seeds;
}

TruncatedDistribution optimal_for(const EstimatorFlags& f, const Scenario& sc, const IO& io)
{
    if (!f.noise_path.empty())
        return load_distribution(f.noise_path);
    return train_noise(io, sc.privacy.epsilon, sc.privacy.range, sc.privacy.sensitivity, f.schedule, f.common.seed)
        .distribution;
}

void warn_sensitivity(const IO& io, const std::vector<RunResult>& results, double s)
{
    if (io.verbosity < 1)
        return;
    for (const RunResult& r : results) {
        if (r.max_adjacent_change > s)
            io.err << "warning: seed " << r.seed << ": consecutive raw measurements differ by "
                   << r.max_adjacent_change << " > sensitivity " << s << '\n';
    }
}

MetricsRowInfo row_info(const Scenario& sc, ExperimentMode mode, const TruncatedDistribution* dist)
{
    MetricsRowInfo info;
    info.scenario = sc.name;
    info.mode = std::string(experiment_mode_name(mode));
    info.noise_type = dist ? std::string(noise_kind_name(dist->kind())) : "none";
    info.epsilon = dist ? dist->epsilon() : 0.0;
    info.range = dist ? dist->range() : 0.0;
    info.delta = dist ? dist->delta() : 0.0;
    return info;
}

void validate_estimator_flags(const EstimatorFlags& f)
{
    require(f.seeds >= 1, "--seeds must be at least 1");
    require(f.reduction_order >= 1, "--reduction-order must be at least 1");
    require(f.jobs >= 0, "--jobs must be non-negative");
    require(!f.horizon || *f.horizon >= 0, "--horizon must be non-negative");
    (void)f.schedule.resolve();
}

int cmd_run_estimator(EstimatorFlags& f, const IO& io)
{
    validate_estimator_flags(f);
    const ExperimentMode mode = parse_experiment_mode(f.privacy_model);
    require(f.noise_type == "optimal" || f.noise_type == "laplace", "--noise-type must be optimal or laplace");
    const Scenario sc = resolve_scenario(f);

    std::optional<TruncatedDistribution> dist;
    if (mode != ExperimentMode::NonPrivate) {
        dist = optimal_for(f, sc, io);
        if (f.noise_type == "laplace")
            dist = matched_laplace(*dist);
    }

    ExperimentOptions options;
    options.reduction_order = f.reduction_order;
    options.jobs = resolved_jobs(f.jobs);
    options.keep_traces = true;
    const auto results = run_experiment(sc, dist ? &*dist : nullptr, mode, seed_list(f.common.seed, f.seeds), options);
    warn_sensitivity(io, results, sc.privacy.sensitivity);

    const fs::path dir(f.common.out);
    std::ostringstream metrics;
    write_metrics_csv_header(metrics, sc.model.n);
    const MetricsRowInfo info = row_info(sc, mode, dist ? &*dist : nullptr);
    double min_containment = 1.0;
    double error_sum = 0.0;
    for (const RunResult& r : results) {
        write_metrics_csv_row(metrics, info, r);
        std::ostringstream jsonl, csv;
        write_trace_jsonl(jsonl, r.trace);
        write_trace_csv(csv, r.trace);
        const std::string stem = "trace_seed" + std::to_string(r.seed);
        write_file_atomic(dir / (stem + ".jsonl"), jsonl.str());
        write_file_atomic(dir / (stem + ".csv"), csv.str());
        min_containment = std::min(min_containment, r.metrics.containment_rate);
        error_sum += r.metrics.mean_center_error;
    }
    write_file_atomic(dir / "metrics.csv", metrics.str());
    if (dist)
        write_file_atomic(dir / "noise.json", distribution_to_json(*dist).dump(2) + "\n");

    io.out << dump_line(json{{"scenario", sc.name}, {"mode", info.mode}, {"noise_type", info.noise_type},
        {"epsilon", info.epsilon}, {"d", info.range}, {"delta", info.delta},
        {"seeds", results.size()}, {"min_containment_rate", min_containment},
        {"mean_center_error", error_sum / static_cast<double>(results.size())}, {"out", f.common.out}});
    if (min_containment < 1.0)
        io.err << "warning: containment rate below 1 (" << min_containment << ")\n";
    return ExitOk;
}

int cmd_compare(EstimatorFlags& f, const IO& io)
{
    validate_estimator_flags(f);
    std::vector<ExperimentMode> modes;
    if (f.privacy_model == "both")
        modes = {ExperimentMode::Cdp, ExperimentMode::Ldp};
    else
        modes = {parse_experiment_mode(f.privacy_model)};
    require(modes.front() != ExperimentMode::NonPrivate, "compare-laplace needs a private model (cdp, ldp or both)");
    const Scenario sc = resolve_scenario(f);

    const TruncatedDistribution optimal = optimal_for(f, sc, io);
    const TruncatedDistribution laplace = matched_laplace(optimal);

    ExperimentOptions options;
    options.reduction_order = f.reduction_order;
    options.jobs = resolved_jobs(f.jobs);
    const auto seeds = seed_list(f.common.seed, f.seeds);

    const fs::path dir(f.common.out);
    std::ostringstream metrics, summary;
    write_metrics_csv_header(metrics, sc.model.n);
    summary << "scenario,mode,noise_type,epsilon,d,delta,seeds,mean_center_error,standard_error,min_containment_rate\n";
    summary << std::setprecision(17);
    for (ExperimentMode mode : modes) {
        for (const TruncatedDistribution* dist : {&optimal, &laplace}) {
            const auto results = run_experiment(sc, dist, mode, seeds, options);
            warn_sensitivity(io, results, sc.privacy.sensitivity);
            const MetricsRowInfo info = row_info(sc, mode, dist);
            double sum = 0.0, sum_sq = 0.0, min_containment = 1.0;
            for (const RunResult& r : results) {
                write_metrics_csv_row(metrics, info, r);
                sum += r.metrics.mean_center_error;
                sum_sq += r.metrics.mean_center_error * r.metrics.mean_center_error;
                min_containment = std::min(min_containment, r.metrics.containment_rate);
            }
            const double count = static_cast<double>(results.size());
            const double mean = sum / count;
            const double var = count > 1 ? std::max(0.0, (sum_sq - count * mean * mean) / (count - 1)) : 0.0;
            const double se = std::sqrt(var / count);
            summary << info.scenario << ',' << info.mode << ',' << info.noise_type << ',' << info.epsilon << ','
                    << info.range << ',' << info.delta << ',' << results.size() << ',' << mean << ',' << se << ','
                    << min_containment << '\n';
            io.err << "compare-laplace: " << info.mode << '/' << info.noise_type << " done\n";
            io.out << dump_line(json{{"mode", info.mode}, {"noise_type", info.noise_type}, {"d", info.range},
                {"delta", info.delta}, {"mean_center_error", mean}, {"standard_error", se},
                {"min_containment_rate", min_containment}});
        }
    }
    write_file_atomic(dir / "metrics.csv", metrics.str());
    write_file_atomic(dir / "summary.csv", summary.str());
    write_file_atomic(dir / "noise_optimal.json", distribution_to_json(optimal).dump(2) + "\n");
    write_file_atomic(dir / "noise_laplace.json", distribution_to_json(laplace).dump(2) + "\n");
    return ExitOk;
}

// --- reproduce-table -------------------------------------------------------

struct TableFlags {
    CommonFlags common;
    ScheduleFlags schedule;
    std::vector<double> epsilons{0.1, 0.3, 0.5, 0.7};
    std::vector<double> ranges{3, 5, 7, 9, 11, 13, 15};
    double sensitivity = 1.0;
    int jobs = 0;
};

int cmd_table(TableFlags& f, const IO& io)
{
    require(f.sensitivity > 0.0 && std::isfinite(f.sensitivity), "--sensitivity must be positive");
    require(!f.epsilons.empty() && !f.ranges.empty(), "--epsilons and --ranges must be non-empty");
    for (double e : f.epsilons)
        require(std::isfinite(e) && e > 0.0, "--epsilons entries must be positive");
    for (double d : f.ranges) {
        require(std::isfinite(d) && d > 0.0, "--ranges entries must be positive");
        (void)grid_for(d, f.sensitivity, 0);
    }
    require(f.jobs >= 0, "--jobs must be non-negative");
    const TrainingSchedule schedule = f.schedule.resolve();

    std::ostream& err = io.err;
    const DeltaTable table = reproduce_delta_table(f.epsilons, f.ranges, f.sensitivity, schedule, f.common.seed,
        resolved_jobs(f.jobs), [&err](std::size_t done, std::size_t total, double eps, double d, double delta) {
            err << "reproduce-table: cell " << done << '/' << total << " eps=" << eps << " d=" << d
                << " delta=" << delta << '\n';
        });
    std::ostringstream csv;
    write_delta_table_csv(csv, table);
    write_file_atomic(f.common.out, csv.str());

    json cells = json::array();
    for (std::size_t r = 0; r < table.epsilons.size(); ++r)
        for (std::size_t c = 0; c < table.ranges.size(); ++c)
            cells.push_back(json{{"epsilon", table.epsilons[r]}, {"d", table.ranges[c]},
                {"delta", table.trained(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))},
                {"laplace_delta", table.laplace(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))}});
    io.out << dump_line(json{{"cells", cells}, {"out", f.common.out}});
    return ExitOk;
}

void add_estimator_options(CLI::App* app, EstimatorFlags& f, bool compare)
{
    add_common(app, f.common, true, compare ? "Output directory" : "Output directory for traces and metrics");
    add_schedule_options(app, f.schedule);
    app->add_option("--scenario", f.scenario, "quadcopter, rotating_object, or a scenario JSON path")->capture_default_str();
    if (compare) {
        f.privacy_model = "both";
        f.seeds = 30;
        app->add_option("--privacy-model", f.privacy_model, "cdp, ldp or both")
            ->capture_default_str()
            ->check(CLI::IsMember({"cdp", "ldp", "both"}));
    } else {
        app->add_option("--privacy-model", f.privacy_model, "cdp, ldp or none")
            ->capture_default_str()
            ->check(CLI::IsMember({"cdp", "ldp", "none"}));
        app->add_option("--noise-type", f.noise_type, "optimal, or laplace at the optimal distribution's (eps, delta)")
            ->capture_default_str()
            ->check(CLI::IsMember({"optimal", "laplace"}));
    }
    app->add_option("--noise", f.noise_path, "Trained distribution JSON (trained on the fly when omitted)");
    app->add_option("--epsilon", f.epsilon, "Privacy epsilon (default: scenario value, 0.3 for the built-ins)");
    app->add_option("--range", f.range, "Noise range d (default: scenario value)");
    app->add_option("--sensitivity", f.sensitivity, "Sensitivity s (default: scenario value)");
    app->add_option("--horizon", f.horizon, "Steps per run (default: scenario value)");
    app->add_option("--seeds", f.seeds, "Number of seeds, starting at --seed")->capture_default_str();
    app->add_option("--reduction-order", f.reduction_order, "Girard reduction order q")->capture_default_str();
    app->add_option("--jobs", f.jobs, "Worker threads (0 = available cores)")->capture_default_str();
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Differentially private zonotope set-based state estimation"};
    app.name(args.empty() ? "zonopriv" : fs::path(args.front()).filename().string());
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    OptimizeFlags opt;
    auto* optimize = app.add_subcommand("optimize-noise", "Train a truncated optimal noise distribution");
    add_common(optimize, opt.common, true, "Distribution JSON output path");
    add_schedule_options(optimize, opt.schedule);
    optimize->add_option("--epsilon", opt.epsilon, "Privacy epsilon")->required();
    optimize->add_option("--range", opt.range, "Noise range d (support is [-d, d])")->required();
    optimize->add_option("--sensitivity", opt.sensitivity, "Sensitivity s")->capture_default_str();

    EstimatorFlags est;
    auto* run_est = app.add_subcommand("run-estimator", "Run the set-based estimator over a scenario");
    add_estimator_options(run_est, est, false);

    EstimatorFlags cmp;
    auto* compare = app.add_subcommand("compare-laplace", "Compare optimal vs truncated-Laplace noise at matched (eps, delta)");
    add_estimator_options(compare, cmp, true);

    TableFlags tab;
    auto* table = app.add_subcommand("reproduce-table", "Train one distribution per (eps, d) cell and tabulate delta");
    add_common(table, tab.common, true, "Table CSV output path");
    add_schedule_options(table, tab.schedule);
    table->add_option("--epsilons", tab.epsilons, "Comma-separated epsilons")->delimiter(',')->capture_default_str();
    table->add_option("--ranges", tab.ranges, "Comma-separated ranges d")->delimiter(',')->capture_default_str();
    table->add_option("--sensitivity", tab.sensitivity, "Sensitivity s")->capture_default_str();
    table->add_option("--jobs", tab.jobs, "Worker threads (0 = available cores)")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty())
        reversed.pop_back();
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ExitOk : ExitValidation;
    }

    try {
        if (*optimize) {
            apply_seed_env(opt.common);
            return cmd_optimize(opt, {out, err, opt.common.verbosity});
        }
        if (*run_est) {
            apply_seed_env(est.common);
            if (est.common.verbosity > 0)
                err << "kernels: " << kernels::isa_name(kernels::active_isa()) << '\n';
            return cmd_run_estimator(est, {out, err, est.common.verbosity});
        }
        if (*compare) {
            apply_seed_env(cmp.common);
            return cmd_compare(cmp, {out, err, cmp.common.verbosity});
        }
        apply_seed_env(tab.common);
        return cmd_table(tab, {out, err, tab.common.verbosity});
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return ExitValidation;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return ExitValidation;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << '\n';
        return ExitRuntime;
    }
}

} // namespace zonopriv

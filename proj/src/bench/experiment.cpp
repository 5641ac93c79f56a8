#include <algorithm>
#include <atomic>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "zonopriv/bench.hpp"
#include "zonopriv/mechanisms.hpp"

namespace zonopriv {

std::string_view experiment_mode_name(ExperimentMode mode) noexcept
{
    switch (mode) {
    case ExperimentMode::Cdp: return "cdp";
    case ExperimentMode::Ldp: return "ldp";
    case ExperimentMode::NonPrivate: return "none";
    }
    return "none";
}

ExperimentMode parse_experiment_mode(const std::string& name)
{
    if (name == "cdp")
        return ExperimentMode::Cdp;
    if (name == "ldp")
        return ExperimentMode::Ldp;
    if (name == "none" || name == "nonprivate")
        return ExperimentMode::NonPrivate;
    throw std::invalid_argument("unknown privacy model '" + name + "' (expected cdp, ldp or none)");
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn)
{
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next.store(count);
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

RunMetrics compute_metrics(const EstimateTrace& trace)
{
    RunMetrics m;
    const std::size_t k = trace.steps.size();
    m.per_step_error = trace.center_error;
    if (k == 0) {
        m.containment_rate = 1.0;
        return m;
    }
    std::size_t hits = 0;
    double err = 0.0;
    m.mean_hull_width = Vector::Zero(trace.steps.front().corrected.dim());
    for (std::size_t i = 0; i < k; ++i) {
        hits += trace.contained[i] ? 1 : 0;
        err += trace.center_error[i];
        m.mean_hull_width += interval_hull(trace.steps[i].corrected).width();
    }
    m.containment_rate = static_cast<double>(hits) / static_cast<double>(k);
    m.mean_center_error = err / static_cast<double>(k);
    m.mean_hull_width /= static_cast<double>(k);
    return m;
}

RunResult run_single(const Scenario& sc, const TruncatedDistribution* dist, ExperimentMode mode,
    std::uint64_t seed, const ExperimentOptions& options)
{
    if (mode != ExperimentMode::NonPrivate && dist == nullptr)
        throw std::invalid_argument("run_experiment: private modes need a noise distribution");

    const TruthRun truth = simulate_truth(sc, seed);
    std::vector<Vector> stream;
    stream.reserve(truth.measurements.size());
    NoiseBounds bounds = sc.bounds;
    EstimatorMode est_mode = EstimatorMode::Private;
    switch (mode) {
    case ExperimentMode::Cdp: {
        Rng rng = Rng::stream(seed, 3);
        for (const Vector& y : truth.measurements)
            stream.push_back(cdp_perturb(y, *dist, rng).values);
        bounds.privacy = privacy_noise_zonotope(*dist);
        break;
    }
    case ExperimentMode::Ldp: {
        std::vector<Rng> rngs;
        for (std::size_t i = 0; i < sc.model.sensors(); ++i)
            rngs.push_back(Rng::stream(seed, 1000 + i));
        for (const Vector& y : truth.measurements)
            stream.push_back(ldp_perturb_all(y, *dist, rngs).values);
        bounds.privacy = privacy_noise_zonotope(*dist);
        break;
    }
    case ExperimentMode::NonPrivate:
        stream = truth.measurements;
        bounds.privacy.reset();
        est_mode = EstimatorMode::NonPrivate;
        break;
    }

    EstimateTrace trace;
    trace.steps = run(sc.model, sc.initial_set, stream, bounds, options.reduction_order, est_mode);
    trace.true_states = truth.states;
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
        const Zonotope& z = trace.steps[k].corrected;
        trace.contained.push_back(contains_point(z, truth.states[k], options.tolerance));
        trace.center_error.push_back((z.center() - truth.states[k]).norm());
    }

    RunResult result;
    result.seed = seed;
    result.metrics = compute_metrics(trace);
    result.max_adjacent_change = max_adjacent_deviation(
        truth.measurements, mode == ExperimentMode::Ldp ? PrivacyModel::Local : PrivacyModel::Central);
    if (options.keep_traces)
        result.trace = std::move(trace);
    return result;
}

std::vector<RunResult> run_experiment(const Scenario& sc, const TruncatedDistribution* dist, ExperimentMode mode,
    const std::vector<std::uint64_t>& seeds, const ExperimentOptions& options)
{
    sc.validate();
    std::vector<RunResult> results(seeds.size());
    parallel_for(seeds.size(), options.jobs,
        [&](std::size_t i) { results[i] = run_single(sc, dist, mode, seeds[i], options); });
    return results;
}

DeltaTable reproduce_delta_table(const std::vector<double>& epsilons, const std::vector<double>& ranges, double s,
    const TrainingSchedule& schedule, std::uint64_t seed, int jobs, const CellProgress& progress)
{
    DeltaTable table;
    table.epsilons = epsilons;
    table.ranges = ranges;
    const auto rows = static_cast<Eigen::Index>(epsilons.size());
    const auto cols = static_cast<Eigen::Index>(ranges.size());
    table.trained = Matrix::Zero(rows, cols);
    table.laplace = Matrix::Zero(rows, cols);

    std::mutex progress_mutex;
    std::size_t done = 0;
    const std::size_t total = epsilons.size() * ranges.size();
    parallel_for(total, jobs, [&](std::size_t cell) {
        const auto r = static_cast<Eigen::Index>(cell / ranges.size());
        const auto c = static_cast<Eigen::Index>(cell % ranges.size());
        const double eps = epsilons[static_cast<std::size_t>(r)];
        const double d = ranges[static_cast<std::size_t>(c)];
        const double delta =
            train_in_sensitivity_units(d, default_half_bins(d, s), eps, s, schedule, seed).distribution.delta();
        table.trained(r, c) = delta;
        table.laplace(r, c) = truncated_laplace_delta(eps, d, s);
        if (progress) {
            std::lock_guard lock(progress_mutex);
            progress(++done, total, eps, d, delta);
        }
    });
    return table;
}

void write_delta_table_csv(std::ostream& os, const DeltaTable& table)
{
    os << "epsilon,source";
    for (double d : table.ranges)
        os << ",d=" << d;
    os << '\n';
    os << std::setprecision(10);
    for (std::size_t r = 0; r < table.epsilons.size(); ++r) {
        for (const auto& [name, values] : {std::pair{"optimal", &table.trained}, std::pair{"laplace", &table.laplace}}) {
            os << table.epsilons[r] << ',' << name;
            for (Eigen::Index c = 0; c < values->cols(); ++c)
                os << ',' << (*values)(static_cast<Eigen::Index>(r), c);
            os << '\n';
        }
    }
}

namespace {

std::string axis_name(Eigen::Index i, Eigen::Index n)
{
    static const char* names[] = {"x", "y", "z"};
    if (n <= 3)
        return names[i];
    return std::to_string(i);
}

} // namespace

void write_metrics_csv_header(std::ostream& os, Eigen::Index n)
{
    os << "scenario,mode,noise_type,epsilon,d,delta,seed,containment_rate,mean_center_error";
    for (Eigen::Index i = 0; i < n; ++i)
        os << ",mean_hull_width_" << axis_name(i, n);
    os << '\n';
}

void write_metrics_csv_row(std::ostream& os, const MetricsRowInfo& info, const RunResult& result)
{
    const auto old_precision = os.precision(17);
    os << info.scenario << ',' << info.mode << ',' << info.noise_type << ',' << info.epsilon << ',' << info.range
       << ',' << info.delta << ',' << result.seed << ',' << result.metrics.containment_rate << ','
       << result.metrics.mean_center_error;
    for (Eigen::Index i = 0; i < result.metrics.mean_hull_width.size(); ++i)
        os << ',' << result.metrics.mean_hull_width(i);
    os << '\n';
    os.precision(old_precision);
}

} // namespace zonopriv

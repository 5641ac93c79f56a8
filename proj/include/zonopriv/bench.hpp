#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "zonopriv/estimator.hpp"
#include "zonopriv/json_io.hpp"
#include "zonopriv/noise_model.hpp"

namespace zonopriv {

enum class ScenarioKind {
    Range,  // identity dynamics, h_i(x) = ||x - a_i||
    Linear, // x' = F x, h_i(x) = H_i x
};

struct TrajectorySpec {
    enum class Source { Synthetic, Csv };
    Source source = Source::Synthetic;
    /// Region the synthetic drift keeps the true state in.
    IntervalBox region;
    /// AR(1) coefficient of the drift coordinates; 0 gives IID draws.
    double smoothing = 0.9;
    /// Multiplies the drift. Values above 1 leave Z_w (stress mode).
    double drift_scale = 1.0;
    /// Columns k, x_1..x_n, y1..ym, with a header line.
    std::string csv_path;
};

struct PrivacyDefaults {
    double range = 1.0;
    double epsilon = 0.3;
    double sensitivity = 1.0;
};

struct Scenario {
    std::string name;
    ScenarioKind kind = ScenarioKind::Range;
    SystemModel model;
    std::vector<Vector> anchors;  // Range
    Matrix dynamics;              // Linear: F
    Matrix measurement_rows;      // Linear: H, m x n
    Vector initial_true_state;
    Zonotope initial_set;
    /// Privacy zonotope is filled in at run time.
    NoiseBounds bounds;
    int horizon = 200;
    IntervalBox arena;
    TrajectorySpec trajectory;
    PrivacyDefaults privacy;

    /// Throws std::invalid_argument when fields disagree.
    void validate() const;
};

/// Attaches model callbacks from kind, anchors / dynamics / measurement rows.
void build_model(Scenario& scenario);

/// Bounds on the linearization residual of h(x) = ||x - a|| over a box
/// around x*. h is convex, so the residual lies in [0, upper()]. Each
/// member is a sound upper bound on its own:
///   lipschitz  2 r, with r the largest distance from x* to a box corner;
///   curvature  M r^2 / 2 with M = 1 / dist(a, box) bounding the Hessian;
///   geometric  sqrt(s^2 + q^2) - s with s the smallest radial coordinate
///              and q the largest perpendicular offset over box vertices.
struct RangeRemainder {
    double lipschitz = 0.0;
    double curvature = std::numeric_limits<double>::infinity();
    double geometric = std::numeric_limits<double>::infinity();
    double upper() const noexcept;
};

RangeRemainder range_remainder(const Vector& anchor, const IntervalBox& box, const Vector& linearization_point);

Scenario quadcopter_scenario(std::uint64_t seed);
Scenario rotating_object_scenario(std::uint64_t seed);
/// "quadcopter" or "rotating_object"; throws std::invalid_argument otherwise.
Scenario scenario_by_name(const std::string& name, std::uint64_t seed);

json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const json& j);
Scenario load_scenario_file(const std::string& path);

struct TruthRun {
    std::vector<Vector> states;        // x_1..x_K
    std::vector<Vector> measurements;  // raw y_1..y_K
    std::vector<Vector> process_noise; // empty for CSV input
    std::vector<Vector> measurement_noise;
};

/// Deterministic per seed. Reads the CSV instead when the scenario points to one.
TruthRun simulate_truth(const Scenario& scenario, std::uint64_t seed);
TruthRun load_trajectory_csv(const std::string& path, Eigen::Index n, std::size_t m);

enum class ExperimentMode { Cdp, Ldp, NonPrivate };
std::string_view experiment_mode_name(ExperimentMode mode) noexcept;
ExperimentMode parse_experiment_mode(const std::string& name);

struct RunMetrics {
    double containment_rate = 0.0;
    double mean_center_error = 0.0;
    std::vector<double> per_step_error;
    Vector mean_hull_width;
};

struct RunResult {
    std::uint64_t seed = 0;
    RunMetrics metrics;
    EstimateTrace trace;        // filled only when traces are requested
    double max_adjacent_change = 0.0;
};

struct ExperimentOptions {
    int reduction_order = 5;
    int jobs = 1;
    bool keep_traces = false;
    /// Containment test tolerance.
    double tolerance = 1e-9;
};

/// Runs one estimator per seed on independent random streams and returns
/// results in seed order. dist is required unless mode is NonPrivate.
std::vector<RunResult> run_experiment(const Scenario& scenario, const TruncatedDistribution* dist,
    ExperimentMode mode, const std::vector<std::uint64_t>& seeds, const ExperimentOptions& options = {});

/// One seed, no thread pool.
RunResult run_single(const Scenario& scenario, const TruncatedDistribution* dist, ExperimentMode mode,
    std::uint64_t seed, const ExperimentOptions& options);

RunMetrics compute_metrics(const EstimateTrace& trace);

struct DeltaTable {
    std::vector<double> epsilons;
    std::vector<double> ranges;
    Matrix trained; // rows epsilons, columns ranges
    Matrix laplace;
};

using CellProgress = std::function<void(std::size_t done, std::size_t total, double epsilon, double range, double delta)>;

/// Trains one distribution per (epsilon, range) cell on the default grid
/// and pairs it with the closed-form truncated-Laplace delta at a = range.
DeltaTable reproduce_delta_table(const std::vector<double>& epsilons, const std::vector<double>& ranges, double s,
    const TrainingSchedule& schedule, std::uint64_t seed, int jobs = 1, const CellProgress& progress = {});

/// Rows: epsilon, source (optimal | laplace), then one column per range.
void write_delta_table_csv(std::ostream& os, const DeltaTable& table);

struct MetricsRowInfo {
    std::string scenario;
    std::string mode;
    std::string noise_type;
    double epsilon = 0.0;
    double range = 0.0;
    double delta = 0.0;
};

void write_metrics_csv_header(std::ostream& os, Eigen::Index n);
void write_metrics_csv_row(std::ostream& os, const MetricsRowInfo& info, const RunResult& result);

/// Evaluates fn(0..count-1) on up to `jobs` threads.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

} // namespace zonopriv

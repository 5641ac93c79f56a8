#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "zonopriv/bench.hpp"

namespace zonopriv {

namespace {

void smooth_drift(Vector& beta, double rho, Rng& rng)
{
    const double innovation = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        beta(j) = std::clamp(rho * beta(j) + innovation * rng.uniform(-1.0, 1.0), -1.0, 1.0);
}

std::vector<double> parse_csv_line(const std::string& line)
{
    std::vector<double> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const auto first = cell.find_first_not_of(" \t\r");
        const auto last = cell.find_last_not_of(" \t\r");
        if (first == std::string::npos)
            throw std::invalid_argument("trajectory CSV: empty cell");
        const std::string trimmed = cell.substr(first, last - first + 1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), v);
        if (ec != std::errc() || ptr != trimmed.data() + trimmed.size())
            throw std::invalid_argument("trajectory CSV: cannot parse '" + trimmed + "'");
        out.push_back(v);
    }
    return out;
}

} // namespace

TruthRun load_trajectory_csv(const std::string& path, Eigen::Index n, std::size_t m)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open trajectory CSV '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("trajectory CSV '" + path + "' is empty");
    const std::size_t width = 1 + static_cast<std::size_t>(n) + m;
    TruthRun run;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const std::vector<double> row = parse_csv_line(line);
        if (row.size() != width)
            throw std::invalid_argument("trajectory CSV: expected " + std::to_string(width) + " columns");
        run.states.push_back(Eigen::Map<const Vector>(row.data() + 1, n));
        run.measurements.push_back(Eigen::Map<const Vector>(row.data() + 1 + n, static_cast<Eigen::Index>(m)));
    }
    return run;
}

TruthRun simulate_truth(const Scenario& sc, std::uint64_t seed)
{
    if (sc.trajectory.source == TrajectorySpec::Source::Csv)
        return load_trajectory_csv(sc.trajectory.csv_path, sc.model.n, sc.model.sensors());

    Rng process_rng = Rng::stream(seed, 1);
    Rng measurement_rng = Rng::stream(seed, 2);
    const Matrix& gw = sc.bounds.process.generators();
    const IntervalBox& region = sc.trajectory.region;
    const auto m = static_cast<Eigen::Index>(sc.model.sensors());

    TruthRun run;
    run.states.reserve(static_cast<std::size_t>(sc.horizon));
    Vector beta = Vector::Zero(gw.cols());
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        beta(j) = process_rng.uniform(-1.0, 1.0);
    Vector x = sc.initial_true_state;
    for (int k = 0; k < sc.horizon; ++k) {
        smooth_drift(beta, sc.trajectory.smoothing, process_rng);
        const Vector fx = sc.model.f(x);
        Vector w = sc.trajectory.drift_scale * (gw * beta);
        if (!region.contains(fx + w)) {
            beta = -beta;
            w = -w;
            if (!region.contains(fx + w))
                w.setZero();
        }
        x = fx + w;

        Vector v(m);
        Vector y(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            v(i) = sample_point(sc.bounds.measurement[static_cast<std::size_t>(i)], measurement_rng)(0);
            y(i) = sc.model.h[static_cast<std::size_t>(i)](x) + v(i);
        }
        run.states.push_back(x);
        run.measurements.push_back(std::move(y));
        run.process_noise.push_back(std::move(w));
        run.measurement_noise.push_back(std::move(v));
    }
    return run;
}

} // namespace zonopriv

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "zonopriv/kernels.hpp"
#include "zonopriv/noise_model.hpp"

namespace zonopriv {

std::vector<double> NoiseModelParams::flatten() const
{
    std::vector<double> theta;
    theta.reserve(1 + b.size() + f.size());
    theta.push_back(a);
    theta.insert(theta.end(), b.begin(), b.end());
    theta.insert(theta.end(), f.begin(), f.end());
    return theta;
}

NoiseModelParams NoiseModelParams::unflatten(std::span<const double> theta, double steepness)
{
    if (theta.size() < 3 || theta.size() % 2 == 0)
        throw std::invalid_argument("NoiseModelParams: flat vector must hold A plus paired B and F entries");
    const std::size_t count = (theta.size() - 1) / 2;
    NoiseModelParams params;
    params.a = theta[0];
    params.b.assign(theta.begin() + 1, theta.begin() + 1 + static_cast<std::ptrdiff_t>(count));
    params.f.assign(theta.begin() + 1 + static_cast<std::ptrdiff_t>(count), theta.end());
    params.steepness = steepness;
    return params;
}

std::vector<double> model_half_distribution(const NoiseModelParams& params, const NoiseGrid& grid)
{
    if (params.b.size() != params.f.size() || params.b.empty())
        throw std::invalid_argument("model_half_distribution: B and F must be non-empty and of equal length");
    const std::size_t n = static_cast<std::size_t>(grid.half_bins);
    std::vector<double> b_sq(params.b.size());
    std::transform(params.b.begin(), params.b.end(), b_sq.begin(), [](double v) { return v * v; });

    // softmax(ln x) == x / sum(x); normalizing x directly avoids the
    // log/exp round trip.
    std::vector<double> x(n);
    kernels::sigmoid_stack(std::span(grid.phi).first(n), params.a * params.a, b_sq, params.steepness, params.f, x);
    const double total = std::accumulate(x.begin(), x.end(), 0.0);
    for (double& v : x)
        v /= 2.0 * total;
    return x;
}

std::vector<double> mirror_concat(std::span<const double> half)
{
    const double sum = std::accumulate(half.begin(), half.end(), 0.0);
    if (std::abs(sum - 0.5) > 1e-10)
        throw std::invalid_argument("mirror_concat: half distribution must sum to 1/2");
    std::vector<double> full(2 * half.size());
    std::copy(half.begin(), half.end(), full.begin());
    std::copy(half.rbegin(), half.rend(), full.begin() + static_cast<std::ptrdiff_t>(half.size()));
    return full;
}

void TrainingSchedule::validate() const
{
    if (!(omega_start > 0.0) || !(omega_min > 0.0) || omega_min > omega_start)
        throw std::invalid_argument("schedule: need 0 < omega_min <= omega_start");
    if (!(gamma_decay > 0.0))
        throw std::invalid_argument("schedule: gamma decay must be positive");
    if (gamma_norm != 1 && gamma_norm != 2)
        throw std::invalid_argument("schedule: gamma norm must be 1 or 2");
    if (epochs < 1)
        throw std::invalid_argument("schedule: epochs must be at least 1");
    if (!(learning_rate > 0.0))
        throw std::invalid_argument("schedule: learning rate must be positive");
    if (depth < 0)
        throw std::invalid_argument("schedule: sigmoid stack depth must be non-negative");
    if (!(steepness > 0.0) || !(fd_step > 0.0))
        throw std::invalid_argument("schedule: steepness and finite-difference step must be positive");
}

double TrainingSchedule::omega_at(int epoch) const
{
    return std::max(omega_start / std::exp2(epoch / gamma_decay), omega_min);
}

TruncatedDistribution::TruncatedDistribution(
    NoiseGrid grid, std::vector<double> p, double epsilon, double sensitivity, NoiseKind kind)
    : grid_(std::move(grid))
    , p_(std::move(p))
    , epsilon_(epsilon)
    , sensitivity_(sensitivity)
    , kind_(kind)
{
    if (p_.size() != grid_.size())
        throw std::invalid_argument("TruncatedDistribution: probability vector does not match grid");
    double sum = 0.0;
    for (double v : p_) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("TruncatedDistribution: probabilities must be finite and non-negative");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("TruncatedDistribution: probabilities must sum to 1");
    const std::size_t n = p_.size();
    for (std::size_t l = 0; l < n / 2; ++l) {
        if (std::abs(p_[l] - p_[n - 1 - l]) > 1e-15)
            throw std::invalid_argument("TruncatedDistribution: distribution is not symmetric");
    }
    for (std::size_t l = n / 2; l + 1 < n; ++l) {
        if (p_[l + 1] > p_[l] + 1e-15)
            throw std::invalid_argument("TruncatedDistribution: distribution does not decay from the center");
    }
    if (!(sensitivity_ > 0.0))
        throw std::invalid_argument("TruncatedDistribution: sensitivity must be positive");

    delta_ = delta_of(p_, grid_, epsilon_, sensitivity_);
    degenerate_ = bin_shift(grid_, sensitivity_) >= n;

    cdf_.resize(n);
    std::partial_sum(p_.begin(), p_.end(), cdf_.begin());
    cdf_.back() = 1.0;
}

TruncatedDistribution TruncatedDistribution::with_training_metadata(
    NoiseModelParams params, std::uint64_t seed, bool degenerate) const
{
    TruncatedDistribution copy = *this;
    copy.params_ = std::move(params);
    copy.seed_ = seed;
    copy.degenerate_ = copy.degenerate_ || degenerate;
    return copy;
}

double TruncatedDistribution::sample(Rng& rng) const
{
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end())
        --it;
    return grid_.phi[static_cast<std::size_t>(it - cdf_.begin())];
}

double TruncatedDistribution::variance() const { return kernels::abs_moment(grid_.phi, p_, 2); }

std::vector<double> distribution_from_params(const NoiseModelParams& params, const NoiseGrid& grid)
{
    std::vector<double> half = model_half_distribution(params, grid);
    std::sort(half.begin(), half.end());
    return mirror_concat(half);
}

LossTerms training_loss(const NoiseModelParams& params, const NoiseGrid& grid, double epsilon, double s,
    const TrainingSchedule& schedule, int epoch)
{
    const std::vector<double> p = distribution_from_params(params, grid);
    LossTerms terms;
    terms.delta = delta_of(p, grid, epsilon, s);
    terms.utility = utility_loss(p, grid, schedule.gamma_norm);
    terms.loss = terms.delta + schedule.omega_at(epoch) * terms.utility;
    return terms;
}

NoiseModelParams initial_params(const NoiseGrid& grid, const TrainingSchedule& schedule, std::uint64_t seed)
{
    Rng rng(seed);
    NoiseModelParams params;
    params.steepness = schedule.steepness;
    params.a = rng.uniform(0.5, 1.5);
    const int count = schedule.depth + 1;
    params.b.resize(static_cast<std::size_t>(count));
    params.f.resize(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
        params.b[static_cast<std::size_t>(j)] = rng.uniform(0.0, 1.0);
        params.f[static_cast<std::size_t>(j)] =
            count == 1 ? -0.5 * grid.d : -grid.d + grid.d * static_cast<double>(j) / (count - 1);
    }
    return params;
}

namespace {

constexpr double kMinAbsA = 1e-6;

void floor_a(std::vector<double>& theta)
{
    if (std::abs(theta[0]) < kMinAbsA)
        theta[0] = theta[0] < 0.0 ? -kMinAbsA : kMinAbsA;
}

} // namespace

TrainedNoise train_with_report(const NoiseGrid& grid, double epsilon, double s, const TrainingSchedule& schedule,
    std::uint64_t init_seed, ProgressCallback progress, void* user)
{
    schedule.validate();
    if (!(s > 0.0))
        throw std::invalid_argument("train: sensitivity must be positive");
    bin_shift(grid, s);

    const double steep = schedule.steepness;
    std::vector<double> theta = initial_params(grid, schedule, init_seed).flatten();
    floor_a(theta);
    const std::size_t dim = theta.size();

    auto eval = [&](const std::vector<double>& th, int epoch) {
        return training_loss(NoiseModelParams::unflatten(th, steep), grid, epsilon, s, schedule, epoch);
    };

    std::vector<double> best_theta = theta;
    LossTerms best_terms;
    double best_loss = std::numeric_limits<double>::infinity();
    int best_epoch = 0;
    double initial_loss = 0.0;

    std::vector<double> grad(dim), m1(dim, 0.0), m2(dim, 0.0), probe(dim);
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double adam_eps = 1e-8;
    const int decile = std::max(1, schedule.epochs / 10);

    for (int t = 0; t < schedule.epochs; ++t) {
        const LossTerms terms = eval(theta, t);
        if (t == 0)
            initial_loss = terms.loss;
        if (terms.loss < best_loss) {
            best_loss = terms.loss;
            best_terms = terms;
            best_theta = theta;
            best_epoch = t;
        }
        if (progress && (t % decile == 0 || t + 1 == schedule.epochs))
            progress(t, terms, user);

        const double h = schedule.fd_step;
        for (std::size_t i = 0; i < dim; ++i) {
            probe = theta;
            probe[i] = theta[i] + h;
            const double up = eval(probe, t).loss;
            probe[i] = theta[i] - h;
            const double down = eval(probe, t).loss;
            grad[i] = (up - down) / (2.0 * h);
        }

        if (schedule.optimizer == Optimizer::Adam) {
            const double c1 = 1.0 - std::pow(beta1, t + 1);
            const double c2 = 1.0 - std::pow(beta2, t + 1);
            for (std::size_t i = 0; i < dim; ++i) {
                m1[i] = beta1 * m1[i] + (1.0 - beta1) * grad[i];
                m2[i] = beta2 * m2[i] + (1.0 - beta2) * grad[i] * grad[i];
                theta[i] -= schedule.learning_rate * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + adam_eps);
            }
        } else {
            for (std::size_t i = 0; i < dim; ++i)
                theta[i] -= schedule.learning_rate * grad[i];
        }
        floor_a(theta);
    }

    NoiseModelParams best = NoiseModelParams::unflatten(best_theta, steep);
    TruncatedDistribution dist(grid, distribution_from_params(best, grid), epsilon, s, NoiseKind::Optimal);
    const bool degenerate = dist.delta() >= 1.0 - 1e-12;
    TrainedNoise out{dist.with_training_metadata(std::move(best), init_seed, degenerate), {}};
    out.report.initial_loss = initial_loss;
    out.report.best_loss = best_loss;
    out.report.best_epoch = best_epoch;
    out.report.best_terms = best_terms;
    return out;
}

TruncatedDistribution train(const NoiseGrid& grid, double epsilon, double s, const TrainingSchedule& schedule,
    std::uint64_t init_seed)
{
    return train_with_report(grid, epsilon, s, schedule, init_seed).distribution;
}

} // namespace zonopriv

namespace zonopriv {

TrainedNoise train_in_sensitivity_units(double d, int half_bins, double epsilon, double s,
    const TrainingSchedule& schedule, std::uint64_t init_seed, ProgressCallback progress, void* user)
{
    if (!(s > 0.0) || !std::isfinite(s))
        throw std::invalid_argument("train: sensitivity must be positive");
    const NoiseGrid unit_grid = build_grid(d / s, half_bins);
    TrainedNoise unit = train_with_report(unit_grid, epsilon, 1.0, schedule, init_seed, progress, user);

    NoiseModelParams params = *unit.distribution.params();
    for (double& f : params.f)
        f *= s;
    params.steepness /= s;
    TruncatedDistribution dist(
        build_grid(d, half_bins), unit.distribution.p(), epsilon, s, NoiseKind::Optimal);
    TrainedNoise out{dist.with_training_metadata(std::move(params), init_seed, unit.distribution.degenerate()),
        unit.report};
    return out;
}

} // namespace zonopriv

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "zonopriv/rng.hpp"

namespace zonopriv {

/// Equidistant symmetric grid of 2N noise values over [-d, d]. Values sit
/// at bin midpoints, phi[l] = (l - N + 1/2) * d / N for l = 0..2N-1, so
/// phi[l] == -phi[2N-1-l] exactly.
struct NoiseGrid {
    double d = 0.0;
    int half_bins = 0;
    std::vector<double> phi;

    double spacing() const noexcept { return d / half_bins; }
    std::size_t size() const noexcept { return phi.size(); }
};

/// Throws std::invalid_argument unless d > 0 and half_bins >= 2.
NoiseGrid build_grid(double d, int half_bins);

/// Smallest N >= min_bins with s * N / d integral (within 1e-9).
int default_half_bins(double d, double s, int min_bins = 200);

/// Bin shift k = s * N / d. Throws std::invalid_argument when s is negative
/// or does not land on the grid within 1e-9.
std::size_t bin_shift(const NoiseGrid& grid, double s);

/// Parameters of the sigmoid-stack noise model:
/// r_l = ln(A^2 + sum_j B_j^2 * sigmoid(C * (phi_l - F_j))).
struct NoiseModelParams {
    double a = 1.0;
    std::vector<double> b;
    double steepness = 500.0;
    std::vector<double> f;

    int depth() const noexcept { return static_cast<int>(b.size()) - 1; }

    /// [A, B_0..B_v, F_0..F_v]; C is not learned.
    std::vector<double> flatten() const;
    static NoiseModelParams unflatten(std::span<const double> theta, double steepness);
};

/// Half distribution on the N left grid points, (1/2) * softmax(r).
std::vector<double> model_half_distribution(const NoiseModelParams& params, const NoiseGrid& grid);

/// Mirror a half distribution (summing to 1/2) into the full symmetric one.
/// Throws std::invalid_argument if the half does not sum to 1/2 within 1e-10.
std::vector<double> mirror_concat(std::span<const double> half);

/// One-sided accountant: sum_l max(0, p[l] - e^eps * p[l + k]) with
/// out-of-range p[l + k] = 0. Equals the maximum over subsets S of
/// P(S) - e^eps * P(S + s).
double shifted_delta(std::span<const double> p, std::size_t shift, double epsilon);

/// Tight delta for an additive mechanism with noise p on grid and
/// sensitivity s. Both shift directions are evaluated and must agree within
/// 1e-12; a disagreement (asymmetric p) throws std::invalid_argument.
/// Shifts of 2N bins or more leave no overlap and give delta = 1.
double delta_of(std::span<const double> p, const NoiseGrid& grid, double epsilon, double s);

/// (sum_l |phi_l|^gamma * p_l)^(1/gamma), gamma in {1, 2}.
double utility_loss(std::span<const double> p, const NoiseGrid& grid, int gamma_norm);

enum class Optimizer { Adam, GradientDescent };

struct TrainingSchedule {
    double omega_start = 0.1;
    double omega_min = 1e-3;
    double gamma_decay = 200.0;
    int gamma_norm = 2;
    int epochs = 2000;
    double learning_rate = 0.02;
    std::uint64_t seed = 0;
    int depth = 5;
    double steepness = 500.0;
    double fd_step = 1e-5;
    Optimizer optimizer = Optimizer::Adam;

    /// Throws std::invalid_argument when a field is out of its domain.
    void validate() const;

    /// max(omega_start / 2^(t / gamma_decay), omega_min).
    double omega_at(int epoch) const;
};

enum class NoiseKind { Optimal, TruncatedLaplace, Custom };

/// Immutable discrete symmetric noise law on a NoiseGrid with its privacy
/// accounting. Construction validates normalization, symmetry and
/// monotone decay from the center, and computes delta with delta_of.
class TruncatedDistribution {
public:
    TruncatedDistribution(NoiseGrid grid, std::vector<double> p, double epsilon, double sensitivity,
        NoiseKind kind = NoiseKind::Custom);

    const NoiseGrid& grid() const noexcept { return grid_; }
    const std::vector<double>& p() const noexcept { return p_; }
    double epsilon() const noexcept { return epsilon_; }
    double sensitivity() const noexcept { return sensitivity_; }
    double delta() const noexcept { return delta_; }
    double range() const noexcept { return grid_.d; }
    NoiseKind kind() const noexcept { return kind_; }
    /// Trained with delta ending at 1, or the shift leaves no overlap.
    bool degenerate() const noexcept { return degenerate_; }

    const std::optional<NoiseModelParams>& params() const noexcept { return params_; }
    std::optional<std::uint64_t> seed() const noexcept { return seed_; }
    TruncatedDistribution with_training_metadata(NoiseModelParams params, std::uint64_t seed, bool degenerate) const;

    /// Inverse-CDF draw of a grid value; |result| <= d.
    double sample(Rng& rng) const;

    double variance() const;

private:
    NoiseGrid grid_;
    std::vector<double> p_;
    std::vector<double> cdf_;
    double epsilon_;
    double sensitivity_;
    double delta_ = 1.0;
    NoiseKind kind_;
    bool degenerate_ = false;
    std::optional<NoiseModelParams> params_;
    std::optional<std::uint64_t> seed_;
};

/// Loss terms at one parameter point.
struct LossTerms {
    double delta = 0.0;
    double utility = 0.0;
    double loss = 0.0;
};

/// Full symmetric distribution of a parameter point; the half is sorted to
/// be non-decreasing toward the center before mirroring.
std::vector<double> distribution_from_params(const NoiseModelParams& params, const NoiseGrid& grid);

LossTerms training_loss(const NoiseModelParams& params, const NoiseGrid& grid, double epsilon, double s,
    const TrainingSchedule& schedule, int epoch);

/// A ~ U(0.5, 1.5), B_j ~ U(0, 1), F_j equally spaced on [-d, 0].
NoiseModelParams initial_params(const NoiseGrid& grid, const TrainingSchedule& schedule, std::uint64_t seed);

struct TrainingReport {
    double initial_loss = 0.0;
    double best_loss = 0.0;
    int best_epoch = 0;
    LossTerms best_terms;
};

struct TrainedNoise {
    TruncatedDistribution distribution;
    TrainingReport report;
};

using ProgressCallback = void (*)(int epoch, const LossTerms& terms, void* user);

/// Minimizes delta + Omega_t * U over the model parameters with
/// central-difference gradients. Returns the lowest-loss iterate seen.
/// Deterministic given init_seed.
TrainedNoise train_with_report(const NoiseGrid& grid, double epsilon, double s, const TrainingSchedule& schedule,
    std::uint64_t init_seed, ProgressCallback progress = nullptr, void* user = nullptr);

TruncatedDistribution train(const NoiseGrid& grid, double epsilon, double s, const TrainingSchedule& schedule,
    std::uint64_t init_seed);

/// Trains on the grid of range d / s with unit sensitivity and maps the
/// result back to range d and sensitivity s (F scaled by s, C by 1 / s).
/// The bin probabilities and delta are unit-free; the utility term and the
/// optimizer steps then do not depend on the measurement unit.
TrainedNoise train_in_sensitivity_units(double d, int half_bins, double epsilon, double s,
    const TrainingSchedule& schedule, std::uint64_t init_seed, ProgressCallback progress = nullptr,
    void* user = nullptr);

/// Truncated Laplace range a = (s / eps) ln(1 + e^eps (1 - e^-eps) / (2 delta)).
double truncated_laplace_range(double epsilon, double delta, double s);

/// Inverse of truncated_laplace_range in delta: e^eps (1 - e^-eps) / (2 (e^(eps a / s) - 1)).
double truncated_laplace_delta(double epsilon, double range, double s);

/// p_l proportional to exp(-eps |phi_l| / s), normalized, with delta
/// accounted on the grid.
TruncatedDistribution truncated_laplace_distribution(const NoiseGrid& grid, double epsilon, double s);

/// Grid for a truncated-Laplace baseline of range at least `range`: picks
/// N in [min_bins, 2 * min_bins] and a bin shift k so that d = s * N / k is
/// the smallest aligned range >= `range`.
NoiseGrid aligned_grid_for_range(double range, double s, int min_bins = 200);

} // namespace zonopriv

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "zonopriv/noise_model.hpp"

namespace zonopriv {

double truncated_laplace_range(double epsilon, double delta, double s)
{
    if (!(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0) || !(s > 0.0))
        throw std::invalid_argument("truncated_laplace_range: need eps > 0, 0 < delta < 1, s > 0");
    return (s / epsilon) * std::log1p(std::exp(epsilon) * (-std::expm1(-epsilon)) / (2.0 * delta));
}

double truncated_laplace_delta(double epsilon, double range, double s)
{
    if (!(epsilon > 0.0) || !(range > 0.0) || !(s > 0.0))
        throw std::invalid_argument("truncated_laplace_delta: need eps > 0, range > 0, s > 0");
    return std::expm1(epsilon) / (2.0 * std::expm1(epsilon * range / s));
}

TruncatedDistribution truncated_laplace_distribution(const NoiseGrid& grid, double epsilon, double s)
{
    if (!(epsilon >= 0.0) || !(s > 0.0))
        throw std::invalid_argument("truncated_laplace_distribution: need eps >= 0, s > 0");
    std::vector<double> p(grid.size());
    for (std::size_t l = 0; l < p.size(); ++l)
        p[l] = std::exp(-epsilon * std::abs(grid.phi[l]) / s);
    // Sum one half and double it so the normalizer is exactly symmetric.
    const std::size_t n = p.size() / 2;
    const double half = std::accumulate(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
    for (std::size_t l = 0; l < n; ++l) {
        p[l] /= 2.0 * half;
        p[p.size() - 1 - l] = p[l];
    }
    return TruncatedDistribution(grid, std::move(p), epsilon, s, NoiseKind::TruncatedLaplace);
}

NoiseGrid aligned_grid_for_range(double range, double s, int min_bins)
{
    if (!(range > 0.0) || !(s > 0.0))
        throw std::invalid_argument("aligned_grid_for_range: range and s must be positive");
    int best_n = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int n = std::max(min_bins, 2); n <= 2 * std::max(min_bins, 2); ++n) {
        const auto k = static_cast<long>(std::floor(s * n / range + 1e-12));
        if (k < 1)
            continue;
        const double d = s * n / static_cast<double>(k);
        if (d >= range * (1.0 - 1e-12) && d < best_d) {
            best_d = d;
            best_n = n;
        }
    }
    if (best_n < 0)
        throw std::invalid_argument("aligned_grid_for_range: range too small for the sensitivity");
    return build_grid(best_d, best_n);
}

} // namespace zonopriv

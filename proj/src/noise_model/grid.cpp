#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zonopriv/noise_model.hpp"

namespace zonopriv {

namespace {
constexpr double kAlignTol = 1e-9;
}

NoiseGrid build_grid(double d, int half_bins)
{
    if (!(d > 0.0) || !std::isfinite(d))
        throw std::invalid_argument("build_grid: range d must be positive and finite");
    if (half_bins < 2)
        throw std::invalid_argument("build_grid: need at least 2 half bins");
    NoiseGrid grid;
    grid.d = d;
    grid.half_bins = half_bins;
    grid.phi.resize(2 * static_cast<std::size_t>(half_bins));
    const double h = d / half_bins;
    for (int l = 0; l < 2 * half_bins; ++l)
        grid.phi[static_cast<std::size_t>(l)] = (static_cast<double>(l - half_bins) + 0.5) * h;
    return grid;
}

int default_half_bins(double d, double s, int min_bins)
{
    if (!(d > 0.0) || !(s > 0.0))
        throw std::invalid_argument("default_half_bins: d and s must be positive");
    for (int n = std::max(min_bins, 2); n <= 1000000; ++n) {
        const double k = s * n / d;
        if (std::abs(k - std::round(k)) <= kAlignTol)
            return n;
    }
    throw std::invalid_argument("default_half_bins: no grid size aligns the sensitivity with the range");
}

std::size_t bin_shift(const NoiseGrid& grid, double s)
{
    if (!(s >= 0.0) || !std::isfinite(s))
        throw std::invalid_argument("bin_shift: sensitivity must be non-negative and finite");
    const double k = s * grid.half_bins / grid.d;
    const double rounded = std::round(k);
    if (std::abs(k - rounded) > kAlignTol)
        throw std::invalid_argument("bin_shift: sensitivity is not a whole number of grid bins");
    return static_cast<std::size_t>(rounded);
}

} // namespace zonopriv

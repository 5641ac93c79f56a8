#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zonopriv/kernels.hpp"
#include "zonopriv/noise_model.hpp"

namespace zonopriv {

double shifted_delta(std::span<const double> p, std::size_t shift, double epsilon)
{
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("shifted_delta: epsilon must be non-negative and finite");
    return std::min(1.0, kernels::shifted_excess(p, shift, std::exp(epsilon)));
}

double delta_of(std::span<const double> p, const NoiseGrid& grid, double epsilon, double s)
{
    if (p.size() != grid.size())
        throw std::invalid_argument("delta_of: distribution size does not match grid");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("delta_of: epsilon must be non-negative and finite");
    const std::size_t k = bin_shift(grid, s);
    if (k >= p.size())
        return 1.0;
    const double scale = std::exp(epsilon);
    const double right = kernels::shifted_excess(p, k, scale);
    const double left = kernels::shifted_excess_left(p, k, scale);
    if (std::abs(right - left) > 1e-12)
        throw std::invalid_argument("delta_of: shift directions disagree; distribution is not symmetric");
    return std::min(1.0, std::max(right, left));
}

double utility_loss(std::span<const double> p, const NoiseGrid& grid, int gamma_norm)
{
    if (p.size() != grid.size())
        throw std::invalid_argument("utility_loss: distribution size does not match grid");
    if (gamma_norm != 1 && gamma_norm != 2)
        throw std::invalid_argument("utility_loss: gamma must be 1 or 2");
    const double moment = kernels::abs_moment(grid.phi, p, gamma_norm);
    return gamma_norm == 1 ? moment : std::sqrt(moment);
}

} // namespace zonopriv

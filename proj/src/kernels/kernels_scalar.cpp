#include "zonopriv/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace zonopriv::kernels::scalar {

namespace {

// exp(-|z|) never overflows; the branch picks the stable form.
inline double stable_sigmoid(double z)
{
    const double t = std::exp(-std::abs(z));
    return z >= 0.0 ? 1.0 / (1.0 + t) : t / (1.0 + t);
}

} // namespace

void sigmoid_stack(std::span<const double> phi, double a_sq, std::span<const double> b_sq,
    double steepness, std::span<const double> centers, std::span<double> out)
{
    assert(b_sq.size() == centers.size());
    assert(out.size() == phi.size());
    for (std::size_t l = 0; l < phi.size(); ++l) {
        double acc = a_sq;
        for (std::size_t j = 0; j < centers.size(); ++j)
            acc += b_sq[j] * stable_sigmoid(steepness * (phi[l] - centers[j]));
        out[l] = acc;
    }
}

double shifted_excess(std::span<const double> p, std::size_t shift, double scale)
{
    const std::size_t n = p.size();
    const std::size_t overlap = shift < n ? n - shift : 0;
    double sum = 0.0;
    for (std::size_t l = 0; l < overlap; ++l)
        sum += std::max(0.0, p[l] - scale * p[l + shift]);
    for (std::size_t l = overlap; l < n; ++l)
        sum += p[l];
    return sum;
}

double shifted_excess_left(std::span<const double> p, std::size_t shift, double scale)
{
    const std::size_t n = p.size();
    const std::size_t head = std::min(shift, n);
    double sum = 0.0;
    for (std::size_t l = 0; l < head; ++l)
        sum += p[l];
    for (std::size_t l = head; l < n; ++l)
        sum += std::max(0.0, p[l] - scale * p[l - shift]);
    return sum;
}

double abs_moment(std::span<const double> phi, std::span<const double> p, int power)
{
    assert(phi.size() == p.size());
    double sum = 0.0;
    if (power == 1) {
        for (std::size_t l = 0; l < p.size(); ++l)
            sum += std::abs(phi[l]) * p[l];
    } else {
        for (std::size_t l = 0; l < p.size(); ++l)
            sum += phi[l] * phi[l] * p[l];
    }
    return sum;
}

} // namespace zonopriv::kernels::scalar

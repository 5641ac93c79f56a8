#include "zonopriv/mechanisms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zonopriv {

SensitivitySpec::SensitivitySpec(PrivacyModel m, double bound)
    : mode(m)
    , s(bound)
{
    if (!(bound > 0.0) || !std::isfinite(bound))
        throw std::invalid_argument("SensitivitySpec: bound must be positive");
}

double ldp_perturb(double y, const TruncatedDistribution& dist, Rng& rng) { return y + dist.sample(rng); }

ProtectedMeasurements ldp_perturb_all(const Vector& y, const TruncatedDistribution& dist, std::vector<Rng>& rngs)
{
    if (y.size() == 0)
        throw std::invalid_argument("ldp_perturb_all: no measurements");
    if (static_cast<Eigen::Index>(rngs.size()) != y.size())
        throw std::invalid_argument("ldp_perturb_all: need one random stream per sensor");
    ProtectedMeasurements out{Vector(y.size()), Vector(y.size())};
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double noise = dist.sample(rngs[static_cast<std::size_t>(i)]);
        out.noise_applied(i) = noise;
        out.values(i) = y(i) + noise;
    }
    return out;
}

ProtectedMeasurements cdp_perturb(const Vector& y, const TruncatedDistribution& dist, Rng& rng)
{
    if (y.size() == 0)
        throw std::invalid_argument("cdp_perturb: no measurements");
    ProtectedMeasurements out{Vector(y.size()), Vector(y.size())};
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double noise = dist.sample(rng);
        out.noise_applied(i) = noise;
        out.values(i) = y(i) + noise;
    }
    return out;
}

Zonotope privacy_noise_zonotope(const TruncatedDistribution& dist)
{
    return Zonotope(Vector::Zero(1), Matrix::Constant(1, 1, dist.range()));
}

double adjacent_privacy_gap(const TruncatedDistribution& dist)
{
    // M(y) has mass p[l] at y + phi_l; M(y + s) has mass p[l - k] there.
    // The worst event collects every cell where the first exceeds e^eps
    // times the second, so the gap is the one-sided excess in each direction.
    const std::size_t k = bin_shift(dist.grid(), dist.sensitivity());
    const double up = shifted_delta(dist.p(), k, dist.epsilon());
    std::vector<double> reversed(dist.p().rbegin(), dist.p().rend());
    const double down = shifted_delta(reversed, k, dist.epsilon());
    return std::max(up, down);
}

double max_adjacent_deviation(const std::vector<Vector>& stream, PrivacyModel mode)
{
    double worst = 0.0;
    for (std::size_t k = 1; k < stream.size(); ++k) {
        const Vector diff = stream[k] - stream[k - 1];
        worst = std::max(worst, mode == PrivacyModel::Local ? diff.lpNorm<Eigen::Infinity>() : diff.norm());
    }
    return worst;
}

} // namespace zonopriv

#pragma once

#include <vector>

#include "zonopriv/noise_model.hpp"
#include "zonopriv/zonotope.hpp"

namespace zonopriv {

enum class PrivacyModel { Local, Central };

/// Adjacency bound for the mechanism: per-sensor (local) or on the whole
/// measurement vector (central).
struct SensitivitySpec {
    PrivacyModel mode = PrivacyModel::Central;
    double s = 1.0;

    SensitivitySpec(PrivacyModel m, double bound);
};

/// Mechanism output. noise_applied is kept for tests and diagnostics only;
/// the estimator consumes values and the privacy noise zonotope.
struct ProtectedMeasurements {
    Vector values;
    Vector noise_applied;
};

/// y + phi with phi drawn from dist.
double ldp_perturb(double y, const TruncatedDistribution& dist, Rng& rng);

/// Local model over m sensors: sensor i draws from its own stream rngs[i].
ProtectedMeasurements ldp_perturb_all(const Vector& y, const TruncatedDistribution& dist, std::vector<Rng>& rngs);

/// Central model: y + Phi with IID coordinates. Throws on empty y.
ProtectedMeasurements cdp_perturb(const Vector& y, const TruncatedDistribution& dist, Rng& rng);

/// <0, [d]>, which contains every realizable noise draw.
Zonotope privacy_noise_zonotope(const TruncatedDistribution& dist);

/// Exact two-sided privacy check of the additive mechanism for inputs that
/// differ by the distribution's sensitivity: the largest
/// Pr[M(y) in S] - e^eps Pr[M(y') in S] over all unions S of grid cells,
/// for both y' = y + s and y' = y - s. A mechanism is (eps, delta)-DP for
/// the adjacent pair iff the returned value is <= delta.
double adjacent_privacy_gap(const TruncatedDistribution& dist);

/// Largest |y_k - y_{k-1}| over consecutive measurement vectors (per
/// coordinate for the local model, L2 for the central model).
double max_adjacent_deviation(const std::vector<Vector>& stream, PrivacyModel mode);

} // namespace zonopriv
